use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn radon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radon")).args(args).output().unwrap()
}

fn radon_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_radon"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("radon-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn compute_reports_dimensions_and_tuple_length() {
    for (fixture, dims, count) in [("four_lines", (1, 3, 2), 6), ("zariski_c", (1, 5, 4), 18)] {
        let out = radon(&["compute", &format!("fixture:{fixture}")]);
        assert_eq!(out.status.code(), Some(0), "{fixture}");
        let v = json(&out);
        assert_eq!(v["dims"]["E"], dims.0);
        assert_eq!(v["dims"]["H"], dims.1);
        assert_eq!(v["dims"]["W"], dims.2);
        assert_eq!(v["gtilde"].as_array().unwrap().len(), count);
    }
}

#[test]
fn rank_prints_the_formula_value() {
    for (fixture, rank) in [("four_lines", "2"), ("zariski_c", "4"), ("zariski_cprime", "4")] {
        let out = radon(&["rank", &format!("fixture:{fixture}")]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), rank);
    }
    let two =
        r#"{"field": {"kind": "rational"}, "n": 1, "r": 2, "matrices": [[["-1"]], [["-1"]]], "braids": ["b1^2"]}"#;
    let out = radon_stdin(&["rank", "-"], two);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "0");
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let first = radon(&["compute", "fixture:zariski_cprime"]);
    let again = radon(&["compute", "fixture:zariski_cprime"]);
    let threaded = radon(&["compute", "fixture:zariski_cprime", "--jobs", "3"]);
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(first.stdout, threaded.stdout);
    let g1 = radon(&["group", "fixture:zariski_c"]);
    let g3 = radon(&["group", "fixture:zariski_c", "--jobs", "3"]);
    assert_eq!(g1.stdout, g3.stdout);
}

#[test]
fn output_flag_writes_the_same_document() {
    let path = std::env::temp_dir().join(format!("radon-cli-{}-out.json", std::process::id()));
    let to_file = radon(&["compute", "fixture:four_lines", "-o", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let to_stdout = radon(&["compute", "fixture:four_lines"]);
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn check_passes_on_the_four_lines() {
    let out = radon(&["check", "fixture:four_lines", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["relations_ok"], true);
    assert_eq!(v["product_identity"], true);
}

#[test]
fn tampered_matrix_exits_with_two() {
    let text = radon_core::fixtures::FOUR_LINES.replacen("[[\"-1\"]]", "[[\"2\"]]", 1);
    let path = temp_file("tampered.json", &text);
    for cmd in ["compute", "check"] {
        let out = radon(&[cmd, path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("product"));
    }
    std::fs::remove_file(path).unwrap();
}

#[test]
fn malformed_input_exits_with_two() {
    for text in [
        "{",
        r#"{"field": {"kind": "rational"}}"#,
        r#"{"field": {"kind": "octonions"}, "n": 1, "r": 1, "matrices": [], "braids": []}"#,
    ] {
        let out = radon_stdin(&["compute", "-"], text);
        assert_eq!(out.status.code(), Some(2), "{text}");
    }
    assert_eq!(radon(&["compute", "/nonexistent/input.json"]).status.code(), Some(2));
    assert_eq!(radon(&["compute", "fixture:nope"]).status.code(), Some(2));
}

#[test]
fn failing_relation_exits_with_two() {
    let text = radon_core::fixtures::FOUR_LINES.replace("\"b3^2\"", "\"b1\"");
    let out = radon_stdin(&["check", "-"], &text);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn group_reports_on_the_sextic_with_cusps_on_a_conic() {
    let out = radon(&["group", "fixture:zariski_c"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["order"], 648);
    assert_eq!(v["solvable"], true);
    let dims: Vec<u64> = v["summands"].as_array().unwrap().iter().map(|s| s["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, [3, 1]);
    assert_eq!(v["summands"][0]["irreducible"], true);
}

#[test]
fn group_of_the_scalar_fixture_has_order_six() {
    let out = radon(&["group", "fixture:scalar_six", "--exact"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["order"], 6);
}

#[test]
fn infinite_group_is_an_internal_failure() {
    let out = radon(&["group", "fixture:four_lines"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infinite"));
}

#[test]
fn cap_exceeded_is_a_warning() {
    let out = radon(&["group", "fixture:four_lines", "--exact", "--cap", "50"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["complete"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn unusable_prime_is_an_input_error() {
    let out = radon(&["group", "fixture:zariski_c", "--primes", "5"]);
    assert_eq!(out.status.code(), Some(2));
}
