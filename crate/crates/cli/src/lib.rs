//! Command-line front end: verification suites, concrete scenarios and
//! operator expansions. All output goes to `out`, diagnostics to `err`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use blowup_chern::blowup::*;
use blowup_chern::geometry::{blowup_total_chern, catalog, euler_identity_check, Scenario};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

/// Largest codimension the universal suites accept.
pub const MAX_CODIM: usize = 8;

#[derive(Debug, Parser)]
#[command(name = "blowup-chern", version, about = "Exact Chern classes of blow-ups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormulaArg {
    Porteous,
    Oldrec,
    Main,
    Difflp,
    Simlem,
    Newnormal,
}

impl From<FormulaArg> for Formula {
    fn from(f: FormulaArg) -> Formula {
        match f {
            FormulaArg::Porteous => Formula::Porteous,
            FormulaArg::Oldrec => Formula::Oldrec,
            FormulaArg::Main => Formula::Main,
            FormulaArg::Difflp => Formula::Difflp,
            FormulaArg::Simlem => Formula::Simlem,
            FormulaArg::Newnormal => Formula::Newnormal,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the verification suites and the scenario catalog.
    Verify {
        #[arg(long, default_value_t = 6)]
        max_codim: usize,
        /// Largest rank of `E` in the operator checks [default: max-codim + 3]
        #[arg(long)]
        max_rank: Option<usize>,
        /// Truncation degree, overriding the 2d + 2 default
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Chern class of the blow-up described by a scenario file.
    Compute {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the expansion of a formula in the tautological class `z`.
    Expand {
        #[arg(long, value_enum)]
        formula: FormulaArg,
        #[arg(long, default_value_t = 2)]
        codim: usize,
        #[arg(long, default_value_t = 0)]
        excess: usize,
        /// Twist of the excess part, `-e` or `+e` (newnormal only)
        #[arg(long, allow_hyphen_values = true)]
        twist: Option<String>,
        #[arg(long)]
        max_degree: Option<u32>,
    },
}

struct ConfigError(String);

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify { max_codim, max_rank, max_degree, format } => {
            run_verify(max_codim, max_rank, max_degree, format, out)
        }
        Command::Compute { scenario, format } => run_compute(&scenario, format, out),
        Command::Expand { formula, codim, excess, twist, max_degree } => {
            run_expand(formula.into(), codim, excess, twist.as_deref(), max_degree, out)
        }
    };
    match result {
        Ok(code) => code,
        Err(ConfigError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_CONFIG
        }
    }
}

type Job = Box<dyn Fn() -> VerificationReport + Send + Sync>;

/// The checks run by `verify`, in output order.
fn verify_jobs(max_codim: usize, max_rank: usize, max_degree: Option<u32>) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for d in 1..=max_codim {
        jobs.push(Box::new(move || verify_pushforward_identity(d)));
        jobs.push(Box::new(move || verify_restriction_identity(d)));
    }
    for d in 1..=max_codim {
        for e in d..=max_rank {
            jobs.push(Box::new(move || verify_oldrec_equals_porteous(d, e, max_degree)));
        }
        jobs.push(Box::new(move || verify_difflp_equals_porteous(d, max_degree)));
        for excess in 0..=(max_rank - d).min(2) {
            jobs.push(Box::new(move || verify_simlem_equals_main(d, excess, 20, 1000 + d as u64, max_degree)));
        }
    }
    for d_prime in 0..max_codim {
        for excess in 0..=2 {
            jobs.push(Box::new(move || verify_newnormal_extremes(d_prime, excess, max_degree)));
        }
    }
    for d in 1..=max_codim {
        jobs.push(Box::new(move || verify_self_intersection(d)));
    }
    // the key-formula regression gets expensive quickly with d
    for d in 1..=max_codim.min(4) {
        jobs.push(Box::new(move || verify_key_formula(d)));
    }
    jobs.push(Box::new(verify_d1_degeneracy));
    for s in catalog() {
        jobs.push(Box::new(move || euler_identity_check(&s)));
    }
    jobs
}

fn run_verify(
    max_codim: usize,
    max_rank: Option<usize>,
    max_degree: Option<u32>,
    format: Format,
    out: &mut dyn Write,
) -> Result<u8, ConfigError> {
    if max_codim == 0 || max_codim > MAX_CODIM {
        return Err(ConfigError(format!("--max-codim must be between 1 and {MAX_CODIM}, got {max_codim}")));
    }
    let max_rank = max_rank.unwrap_or(max_codim + 3);
    if max_rank < max_codim {
        return Err(ConfigError(format!("--max-rank {max_rank} is below --max-codim {max_codim}")));
    }
    if max_degree == Some(0) {
        return Err(ConfigError("--max-degree must be positive".into()));
    }
    let jobs = verify_jobs(max_codim, max_rank, max_degree);
    let reports: Vec<VerificationReport> = jobs.par_iter().map(|job| job()).collect();
    let passed = reports.iter().filter(|r| r.pass).count();
    let written = match format {
        Format::Text => {
            let mut text = String::new();
            for r in &reports {
                text.push_str(&r.summary_line());
                text.push('\n');
            }
            text.push_str(&format!("{passed} of {} checks passed\n", reports.len()));
            out.write_all(text.as_bytes())
        }
        Format::Json => {
            let text = serde_json::to_string_pretty(&reports).expect("reports serialize");
            writeln!(out, "{text}")
        }
    };
    written.map_err(|e| ConfigError(format!("cannot write output: {e}")))?;
    Ok(if passed == reports.len() { EXIT_OK } else { EXIT_FAIL })
}

fn run_compute(path: &PathBuf, format: Format, out: &mut dyn Write) -> Result<u8, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let scenario =
        Scenario::from_json(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let result = blowup_total_chern(&scenario).map_err(|e| ConfigError(format!("{scenario}: {e}")))?;
    let report = euler_identity_check(&scenario);
    let y = result.class.y_part();
    let x = result.class.x_part();
    let written = match format {
        Format::Text => {
            let text = format!(
                "scenario: {scenario}\n\
                 c(T) = f^*({y}) + j_*({x})\n\
                 pushforward: {}\n\
                 restriction: {}\n\
                 chi = {}\n\
                 euler identity: {}\n",
                result.pushed,
                result.restricted,
                result.chi,
                report.summary_line()
            );
            out.write_all(text.as_bytes())
        }
        Format::Json => {
            let value = json!({
                "scenario": scenario,
                "pullback_part": y.to_string(),
                "exceptional_part": x.to_string(),
                "pushforward": result.pushed.to_string(),
                "restriction": result.restricted.to_string(),
                "chi": result.chi.to_string(),
                "euler_identity": report,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("json value"))
        }
    };
    written.map_err(|e| ConfigError(format!("cannot write output: {e}")))?;
    Ok(if report.pass { EXIT_OK } else { EXIT_FAIL })
}

fn run_expand(
    formula: Formula,
    codim: usize,
    excess: usize,
    twist: Option<&str>,
    max_degree: Option<u32>,
    out: &mut dyn Write,
) -> Result<u8, ConfigError> {
    let config = |e: blowup_chern::Error| ConfigError(e.to_string());
    let twist: Option<Twist> = twist.map(str::parse).transpose().map_err(config)?;
    let text = expand_text(formula, codim, excess, twist, max_degree).map_err(config)?;
    out.write_all(text.as_bytes()).map_err(|e| ConfigError(format!("cannot write output: {e}")))?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("blowup-chern").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn expand_porteous_codim_two() {
        let (code, out, _) = run_args(&["expand", "--formula", "porteous", "--codim", "2"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "alpha = -1 + z\n");
    }

    #[test]
    fn expand_difflp_codim_one_reduces_to_one() {
        let (code, out, _) = run_args(&["expand", "--formula", "difflp", "--codim", "1"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("reduced = 1\n"), "{out}");
    }

    #[test]
    fn expand_main_codim_one() {
        let (code, out, _) = run_args(&["expand", "--formula", "main", "--codim", "1", "--excess", "0"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("expr = 1 + n1 + z + n1*z + z^2"), "{out}");
        assert!(out.contains("F0 = 1 + n1\n"), "{out}");
    }

    #[test]
    fn unsupported_combinations() {
        assert_eq!(run_args(&["expand", "--formula", "porteous", "--codim", "0"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["expand", "--formula", "difflp", "--excess", "1"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["expand", "--formula", "main", "--twist", "+e"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["expand", "--formula", "newnormal", "--twist", "x"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["expand", "--formula", "nope"]).0, EXIT_CONFIG);
    }

    #[test]
    fn verify_config_errors() {
        let (code, out, err) = run_args(&["verify", "--max-codim", "0"]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(out.is_empty());
        assert!(err.contains("--max-codim"));
        assert_eq!(run_args(&["verify", "--max-codim", "3", "--max-rank", "2"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["verify", "--bogus"]).0, EXIT_CONFIG);
    }

    #[test]
    fn job_list_shape() {
        let jobs = verify_jobs(3, 6, None);
        // 3 x 2 universal checks come first
        let first: Vec<String> = jobs.iter().take(6).map(|j| j().check).collect();
        assert_eq!(first.iter().filter(|c| c.contains("pushforward")).count(), 3);
        assert_eq!(first.iter().filter(|c| c.contains("restriction")).count(), 3);
    }
}
