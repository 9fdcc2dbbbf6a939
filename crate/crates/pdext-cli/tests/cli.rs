//! End-to-end checks of the binary: exit-code contract, JSON verdicts, and
//! byte-identical artifacts across reruns.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pdext(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdext"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn pd_check_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let ok = pdext(dir.path(), &["pd-check", "--f", r#"{"kind":"catalog","id":"F6"}"#, "--grid", "16"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = stdout_json(&ok);
    assert_eq!(v["verdict"], "psd");

    // sampled 1/(1-x²) is indefinite on {0, 1/2}
    let spec = r#"{"kind":"sampled","nodes":[-0.6,-0.5,0.0,0.5,0.6],"re":[1.5625,1.3333333333333333,1.0,1.3333333333333333,1.5625]}"#;
    let bad = pdext(dir.path(), &["pd-check", "--f", spec, "--points", "0.0,0.5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(stdout_json(&bad)["verdict"], "indefinite");
}

#[test]
fn malformed_json_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let r = pdext(dir.path(), &["pd-check", "--f", "{not json"]);
    assert_eq!(r.status.code(), Some(2));
    let r = pdext(dir.path(), &["bochner", "--op", "verify", "--f", r#"{"kind":"catalog","id":"F2"}"#, "--mu", "{]"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn mercer_emits_the_expected_top_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let r = pdext(
        dir.path(),
        &["mercer", "--kernel", "greens-polya-f3", "--a", "2", "--n", "400", "--modes", "2"],
    );
    assert_eq!(r.status.code(), Some(0));
    let v = stdout_json(&r);
    let top = v["top_eigenvalue"].as_f64().unwrap();
    let want = 2.0 / (1.0 + (std::f64::consts::PI / 2.0) * (std::f64::consts::PI / 2.0));
    assert!((top - want).abs() < 1e-3, "top {top} want {want}");
    // eigenvalue CSV exists with a header and full-precision values
    let csv = fs::read_to_string(dir.path().join("mercer_eigenvalues.csv")).unwrap();
    assert!(csv.starts_with("k,lambda"));
    assert!(csv.lines().nth(1).unwrap().contains('e'));
}

#[test]
fn shannon_verdicts_and_measure_schema() {
    let dir = tempfile::tempdir().unwrap();
    let pass = pdext(
        dir.path(),
        &["shannon", "--f", r#"{"kind":"catalog","id":"F3"}"#, "--mu", r#"{"densities":[{"id":"cauchy"}]}"#],
    );
    assert_eq!(pass.status.code(), Some(0));
    assert_eq!(stdout_json(&pass)["pass"], true);

    let fail = pdext(
        dir.path(),
        &["shannon", "--f", r#"{"kind":"catalog","id":"F2","a":1.0}"#, "--mu", r#"{"densities":[{"id":"cauchy"}]}"#],
    );
    assert_eq!(fail.status.code(), Some(1));
    assert_eq!(stdout_json(&fail)["pass"], false);

    // atomic measures in the schema
    let atoms = pdext(
        dir.path(),
        &["bochner", "--op", "verify", "--f", r#"{"kind":"catalog","id":"F6"}"#, "--mu", r#"{"atoms":[[1.0,0.5],[-1.0,0.5]]}"#],
    );
    assert_eq!(atoms.status.code(), Some(0));
}

#[test]
fn reruns_are_byte_identical() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    let args = ["gp-sim", "--kernel", "bridge", "--m", "500", "--seed", "11", "--times", "0.05:0.95:12"];
    let a = pdext(dir1.path(), &args);
    let b = pdext(dir2.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    for name in ["gp_paths.csv", "gp_cov_report.json"] {
        let fa = fs::read(dir1.path().join(name)).unwrap();
        let fb = fs::read(dir2.path().join(name)).unwrap();
        assert_eq!(fa, fb, "{name} differs between reruns");
    }
}

#[test]
fn periodize_positivity_drives_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let good = pdext(dir.path(), &["periodize", "--f", r#"{"kind":"catalog","id":"F3"}"#, "--window", "unit-box", "--n-max", "16"]);
    assert_eq!(good.status.code(), Some(0));
    let bad = pdext(dir.path(), &["periodize", "--f", r#"{"kind":"catalog","id":"F5"}"#, "--window", "unit-box", "--n-max", "8"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(stdout_json(&bad)["all_nonnegative"], false);
}

#[test]
fn catalog_table_lists_all_seven_rows() {
    let dir = tempfile::tempdir().unwrap();
    let r = pdext(dir.path(), &["catalog-table"]);
    assert_eq!(r.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("catalog_table.csv")).unwrap();
    assert_eq!(csv.lines().count(), 8); // header + seven rows
    let v = stdout_json(&r);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    // index column reproduces the (0,0)/(1,1) pattern
    let indices: Vec<&str> = rows.iter().map(|r| r["indices"].as_str().unwrap()).collect();
    assert_eq!(indices, ["(0,0)", "(1,1)", "(1,1)", "(0,0)", "(0,0)", "(0,0)", "(0,0)"]);
}

#[test]
fn rkhs_membership_contract() {
    let dir = tempfile::tempdir().unwrap();
    let member = pdext(dir.path(), &["rkhs", "--op", "membership", "--f", r#"{"kind":"catalog","id":"F3"}"#, "--xi", "exp"]);
    assert_eq!(member.status.code(), Some(0));
    let v = stdout_json(&member);
    assert_eq!(v["verdict"], "member-evidence");
    let a = v["norm_estimate"].as_f64().unwrap();
    assert!((a - 1.0).abs() < 5e-2);

    let diverging = pdext(dir.path(), &["rkhs", "--op", "membership", "--f", r#"{"kind":"catalog","id":"F1"}"#, "--xi", "one"]);
    assert_eq!(diverging.status.code(), Some(1));
    assert_eq!(stdout_json(&diverging)["verdict"], "diverging");
}
