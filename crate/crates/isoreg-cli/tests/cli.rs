//! End-to-end tests against the built binary: format parsing, output shape,
//! exit codes, and the determinism contract.

use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoreg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn instance(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn stdout_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

const WORKED_DAG: &str = "isoreg 1 dag\n5 4\n0 1\n5 1\n3 1\n4 1\n9 1\n0 1\n1 2\n2 3\n3 4\n";

#[test]
fn chain_l2_prints_halves() {
    let f = instance("isoreg 1 chain\n2\n1 1\n0 1\n");
    let text = stdout_ok(&[
        "regress",
        "--metric",
        "l2",
        "--order",
        "chain",
        "--input",
        f.path().to_str().unwrap(),
    ]);
    assert!(text.contains("v 0 0.5\n"), "got: {text}");
    assert!(text.contains("v 1 0.5\n"));
    assert!(text.contains("error l2 0.5\n"));
}

#[test]
fn dag_l0_reports_error_and_antichain() {
    let f = instance(WORKED_DAG);
    let text = stdout_ok(&["regress", "--metric", "l0", "--input", f.path().to_str().unwrap()]);
    assert!(text.contains("v 0 0\n"));
    assert!(text.contains("v 4 9\n"));
    assert!(text.contains("error l0 1\n"));
    assert!(text.contains("# diag antichain_weight=2\n"));
}

#[test]
fn json_report_has_contract_fields() {
    let f = instance(WORKED_DAG);
    let text = stdout_ok(&[
        "regress",
        "--metric",
        "l0",
        "--format",
        "json",
        "--input",
        f.path().to_str().unwrap(),
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["values"].as_array().unwrap().len(), 5);
    assert_eq!(doc["error_p_sum"], "1");
    assert_eq!(doc["diagnostics"]["antichain_weight"], "2");
    assert!(doc["diagnostics"]["violator_vertices"].is_u64());
}

#[test]
fn lp_two_vertex_midpoint() {
    let f = instance("isoreg 1 chain\n2\n1 1\n0 1\n");
    let text = stdout_ok(&[
        "regress",
        "--metric",
        "lp",
        "--p",
        "2",
        "--input",
        f.path().to_str().unwrap(),
    ]);
    assert!(text.contains("v 0 0.5\n"), "got: {text}");
    assert!(text.contains("v 1 0.5\n"));
    assert!(text.starts_with("v "));
    assert!(text.contains("error lp 0.5"));
}

#[test]
fn oracle_refuses_large_instances_with_exit_3() {
    let mut body = String::from("isoreg 1 chain\n12\n");
    for i in 0..12 {
        body.push_str(&format!("{} 1\n", 11 - i));
    }
    let f = instance(&body);
    let out = run(&["oracle", "--metric", "l0", "--input", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("isoreg-error:"), "got: {err}");
}

#[test]
fn oracle_agrees_on_small_points() {
    let pts = "isoreg 1 points\n4 2\n0 0 3 1\n0 1 2 1\n1 0 1 1\n1 1 0 1\n";
    let f = instance(pts);
    let fast = stdout_ok(&["regress", "--metric", "l1", "--input", f.path().to_str().unwrap()]);
    let slow = stdout_ok(&["oracle", "--metric", "l1", "--input", f.path().to_str().unwrap()]);
    let err_line = |s: &str| {
        s.lines()
            .find(|l| l.starts_with("error "))
            .unwrap()
            .to_string()
    };
    assert_eq!(err_line(&fast), err_line(&slow));
}

#[test]
fn negative_weight_is_an_input_error_naming_the_line() {
    let f = instance("isoreg 1 chain\n2\n5 1\n3 -2\n");
    let out = run(&["regress", "--input", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 4"), "got: {err}");
    assert!(err.contains("negative weight"));
}

#[test]
fn bad_header_is_an_input_error() {
    let f = instance("isoreg 1 rings\n0\n");
    let out = run(&["regress", "--input", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("unknown instance kind"));
}

#[test]
fn missing_file_is_an_input_error() {
    let out = run(&["regress", "--input", "/nonexistent/instance.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .starts_with("isoreg-error:"));
}

#[test]
fn order_mismatch_is_rejected() {
    let f = instance(WORKED_DAG);
    let out = run(&[
        "regress",
        "--order",
        "chain",
        "--input",
        f.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("cannot solve"));
}

#[test]
fn rendezvous_needs_points() {
    let f = instance(WORKED_DAG);
    let out = run(&[
        "violator",
        "--violator",
        "rendezvous",
        "--input",
        f.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn violator_stats_summarize_sizes() {
    let pts = "isoreg 1 points\n4 2\n0 0 3 1\n0 1 2 1\n1 0 1 1\n1 1 0 1\n";
    let f = instance(pts);
    let text = stdout_ok(&["violator", "--stats", "--input", f.path().to_str().unwrap()]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("n_hat "));
    assert!(lines[1].starts_with("m_hat "));
    assert!(lines[2].starts_with("steiner_count "));

    let full = stdout_ok(&["violator", "--input", f.path().to_str().unwrap()]);
    assert!(full.lines().any(|l| l.starts_with("edge ")));
}

#[test]
fn closure_and_rendezvous_reach_the_same_l0_error() {
    let pts = "isoreg 1 points\n5 2\n0 0 4 2\n1 0 3 1\n0 1 2 2\n2 2 1 1\n3 3 0 3\n";
    let f = instance(pts);
    let err_line = |s: &str| {
        s.lines()
            .find(|l| l.starts_with("error "))
            .unwrap()
            .to_string()
    };
    let a = stdout_ok(&["regress", "--metric", "l0", "--input", f.path().to_str().unwrap()]);
    let b = stdout_ok(&[
        "regress",
        "--metric",
        "l0",
        "--violator",
        "closure",
        "--input",
        f.path().to_str().unwrap(),
    ]);
    assert_eq!(err_line(&a), err_line(&b));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let pts = "isoreg 1 boxes\n3 2\n0 0 2 2 5 1\n1 1 3 3 1 2\n0 1 1 2 3 1\n";
    let f = instance(pts);
    let args = [
        "regress",
        "--metric",
        "l1",
        "--format",
        "json",
        "--input",
        f.path().to_str().unwrap(),
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn output_flag_writes_the_report_file() {
    let f = instance("isoreg 1 chain\n2\n1 1\n0 1\n");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let out = run(&[
        "regress",
        "--metric",
        "l2",
        "--input",
        f.path().to_str().unwrap(),
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.contains("error l2 0.5"));
}

#[test]
fn bench_is_seed_deterministic_on_stdout() {
    let args = [
        "bench",
        "--order",
        "chain",
        "--metric",
        "l2",
        "--seed",
        "3",
    ];
    let first = run(&args);
    assert!(first.status.success());
    let text = String::from_utf8(first.stdout.clone()).unwrap();
    assert!(text.contains("error l2 "), "got: {text}");
    assert!(!text.contains("\nv "), "bench must not dump values");
    assert!(String::from_utf8(first.stderr)
        .unwrap()
        .starts_with("isoreg-bench:"));
    assert_eq!(first.stdout, run(&args).stdout);
}
