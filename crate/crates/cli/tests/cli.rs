use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blowup-chern")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn verify_small_suite_passes() {
    let o = cli(&["verify", "--max-codim", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[..6].iter().all(|l| l.starts_with("PASS pushforward_identity") || l.starts_with("PASS restriction_identity")));
    assert!(!text.contains("FAIL"));
    assert!(text.contains("newnormal"));
    assert!(text.contains("euler_identity"));
}

#[test]
fn verify_output_is_deterministic() {
    let a = cli(&["verify", "--max-codim", "2"]);
    let b = cli(&["verify", "--max-codim", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_json_is_an_array_of_reports() {
    let o = cli(&["verify", "--max-codim", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let reports = v.as_array().unwrap();
    assert!(!reports.is_empty());
    for r in reports {
        for key in ["check", "parameters", "pass", "residual", "elapsed_ms"] {
            assert!(r.get(key).is_some(), "missing {key} in {r}");
        }
        assert_eq!(r["pass"], serde_json::Value::Bool(true));
        assert_eq!(r["residual"], "0");
    }
}

#[test]
fn verify_config_errors_exit_two() {
    for args in [
        &["verify", "--max-codim", "0"][..],
        &["verify", "--max-codim", "9"],
        &["verify", "--max-codim", "4", "--max-rank", "3"],
        &["verify", "--unknown-flag"],
        &["verify", "--format", "xml"],
    ] {
        let o = cli(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn verify_reports_failures_with_exit_one() {
    // too small a truncation cannot represent the operator expansions
    let o = cli(&["verify", "--max-codim", "2", "--max-degree", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn compute_point_in_plane() {
    let o = cli(&["compute", fixture("point_in_p2.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("pushforward: 1 + 3*H + 4*H^2\n"), "{text}");
    assert!(text.contains("chi = 4\n"));
    assert!(text.contains("euler identity: PASS"));
}

#[test]
fn compute_line_and_complete_intersection() {
    let o = cli(&["compute", fixture("line_in_p3.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("chi = 6\n"));
    let o = cli(&["compute", fixture("ci22_in_p3.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("chi = 4\n"));
}

#[test]
fn compute_json() {
    let o = cli(&["compute", fixture("point_in_p2.json").to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pushforward"], "1 + 3*H + 4*H^2");
    assert_eq!(v["chi"], "4");
    assert_eq!(v["euler_identity"]["pass"], serde_json::Value::Bool(true));
}

#[test]
fn compute_rejects_bad_input() {
    let o = cli(&["compute", fixture("empty.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1 column 0"), "{}", stderr(&o));
    let o = cli(&["compute", fixture("malformed.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    let o = cli(&["compute", fixture("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn expand_examples() {
    let o = cli(&["expand", "--formula", "porteous", "--codim", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "alpha = -1 + z\n");
    let o = cli(&["expand", "--formula", "difflp", "--codim", "1"]);
    assert!(stdout(&o).contains("reduced = 1\n"));
    let o = cli(&["expand", "--formula", "oldrec", "--codim", "3"]);
    assert!(stdout(&o).contains("F0 = 1\n"));
    let o = cli(&["expand", "--formula", "newnormal", "--codim", "1", "--excess", "1", "--twist", "+e"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("expr = 1 + n1 + q1 - z + n1*q1 - n1*z\n"), "{}", stdout(&o));
}

#[test]
fn expand_is_deterministic() {
    let args = ["expand", "--formula", "main", "--codim", "3", "--excess", "2"];
    assert_eq!(cli(&args).stdout, cli(&args).stdout);
}
