//! wasm-bindgen entry points for the static page in `www/`. Each export wraps
//! a plain function returning `Result<String, String>` so the logic can be
//! tested natively.

use blowup_chern::blowup::*;
use blowup_chern::geometry::{blowup_total_chern, euler_identity_check, Scenario};
use wasm_bindgen::prelude::*;

/// Largest codimension offered by the page; higher ones take seconds.
pub const MAX_DEMO_CODIM: usize = 5;

pub fn expand(formula: &str, codim: usize, excess: usize, twist: &str) -> Result<String, String> {
    let formula: Formula = formula.parse().map_err(|e: blowup_chern::Error| e.to_string())?;
    let twist = match twist.trim() {
        "" => None,
        t => Some(t.parse::<Twist>().map_err(|e| e.to_string())?),
    };
    if codim > MAX_DEMO_CODIM {
        return Err(format!("codimension is limited to {MAX_DEMO_CODIM} here"));
    }
    expand_text(formula, codim, excess, twist, None).map_err(|e| e.to_string())
}

pub fn compute(scenario_json: &str) -> Result<String, String> {
    let s = Scenario::from_json(scenario_json).map_err(|e| e.to_string())?;
    let r = blowup_total_chern(&s).map_err(|e| e.to_string())?;
    let check = euler_identity_check(&s);
    Ok(format!(
        "scenario: {s}\nc(T) = f^*({}) + j_*({})\npushforward: {}\nrestriction: {}\nchi = {}\neuler identity: {}\n",
        r.class.y_part(),
        r.class.x_part(),
        r.pushed,
        r.restricted,
        r.chi,
        check.summary_line()
    ))
}

pub fn verify(d: usize) -> Result<String, String> {
    if d == 0 || d > MAX_DEMO_CODIM {
        return Err(format!("codimension must be between 1 and {MAX_DEMO_CODIM}"));
    }
    let mut reports = vec![
        verify_pushforward_identity(d),
        verify_restriction_identity(d),
        verify_self_intersection(d),
        verify_oldrec_equals_porteous(d, d + 1, None),
        verify_newnormal_extremes(d, 1, None),
    ];
    if d <= 4 {
        reports.push(verify_key_formula(d));
        reports.push(verify_difflp_equals_porteous(d, None));
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let mut out: String = reports.iter().map(|r| r.summary_line() + "\n").collect();
    out.push_str(&format!("{passed} of {} checks passed\n", reports.len()));
    Ok(out)
}

#[wasm_bindgen]
pub fn expand_formula(formula: &str, codim: u32, excess: u32, twist: &str) -> Result<String, JsValue> {
    expand(formula, codim as usize, excess as usize, twist).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn compute_scenario(scenario_json: &str) -> Result<String, JsValue> {
    compute(scenario_json).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn verify_codim(d: u32) -> Result<String, JsValue> {
    verify(d as usize).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_examples() {
        assert_eq!(expand("porteous", 2, 0, "").unwrap(), "alpha = -1 + z\n");
        assert!(expand("difflp", 1, 0, "").unwrap().contains("reduced = 1\n"));
        assert!(expand("newnormal", 1, 1, "+e").unwrap().starts_with("expr = 1 + n1 + q1 - z"));
    }

    #[test]
    fn expand_errors() {
        assert!(expand("nope", 2, 0, "").is_err());
        assert!(expand("newnormal", 1, 1, "x").is_err());
        assert!(expand("oldrec", 2, 1, "").is_err());
        assert!(expand("main", 6, 0, "").is_err());
    }

    #[test]
    fn compute_point_in_plane() {
        let text = compute(r#"{"ambient_dim": 2, "center": {"type": "linear", "dim": 0}}"#).unwrap();
        assert!(text.contains("pushforward: 1 + 3*H + 4*H^2\n"), "{text}");
        assert!(text.contains("chi = 4\n"));
        assert!(compute("").unwrap_err().contains("line 1 column 0"));
    }

    #[test]
    fn verify_small_codims() {
        for d in 1..=2 {
            let text = verify(d).unwrap();
            assert!(!text.contains("FAIL"), "{text}");
        }
        assert!(verify(0).is_err());
        assert!(verify(6).is_err());
    }
}
