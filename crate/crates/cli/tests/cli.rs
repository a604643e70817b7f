//! End-to-end tests of the `fpade` binary: exit codes, report shape,
//! determinism, and the solution exports.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fpade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpade"))
        .args(args)
        .env_remove("FPADE_PREC")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON report")
}

fn check_names(r: &Value) -> Vec<String> {
    r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap().to_string())
        .collect()
}

fn all_pass(r: &Value) -> bool {
    r["checks"].as_array().unwrap().iter().all(|c| c["pass"].as_bool().unwrap())
}

fn tmp_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn exponent_reports_the_three_enclosures() {
    let out = fpade(&["exponent", "--no-timings"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["command"], "exponent");
    let names = check_names(&r);
    assert!(names.iter().any(|n| n.contains("eps0")));
    assert!(names.iter().any(|n| n.contains("theta")));
    assert!(names.iter().any(|n| n.contains("below 33/34")));
    assert!(all_pass(&r));
}

#[test]
fn scan_recovers_the_classical_solutions_with_exports() {
    let jsonl = tmp_path("sol.jsonl");
    let csv = tmp_path("sol.csv");
    let out = fpade(&[
        "scan",
        "--poly",
        "-1,0,1",
        "--s",
        "1",
        "--range",
        "1:120",
        "--jsonl",
        jsonl.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--no-timings",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let names = check_names(&r);
    assert!(names.contains(&"solution at n = 4".to_string()));
    assert!(names.contains(&"solution at n = 5".to_string()));
    assert!(names.contains(&"solution at n = 7".to_string()));
    assert_eq!(names.iter().filter(|n| n.starts_with("solution")).count(), 3);

    let lines = std::fs::read_to_string(&jsonl).unwrap();
    assert_eq!(
        lines,
        "{\"n\":4,\"x\":\"5\",\"digits_of_value\":2}\n\
         {\"n\":5,\"x\":\"11\",\"digits_of_value\":3}\n\
         {\"n\":7,\"x\":\"71\",\"digits_of_value\":4}\n"
    );
    let table = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(table, "n,x,digits_of_value\n4,5,2\n5,11,3\n7,71,4\n");
}

#[test]
fn empty_scan_still_exits_zero() {
    let out = fpade(&["scan", "--poly", "0,0,1", "--range", "2:40", "--no-timings"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(check_names(&r), vec!["scan completed".to_string()]);
}

#[test]
fn prefilter_does_not_change_scan_reports() {
    let plain = fpade(&["scan", "--poly", "1,0,1", "--range", "1:60", "--no-timings"]);
    let filtered = fpade(&[
        "scan", "--poly", "1,0,1", "--range", "1:60", "--primes", "211,223", "--no-timings",
    ]);
    assert_eq!(plain.status.code(), Some(0));
    // The primes echo differs; the checks must not.
    assert_eq!(report(&plain)["checks"], report(&filtered)["checks"]);
}

#[test]
fn reports_are_byte_identical_without_timings() {
    let a = fpade(&["exponent", "--no-timings"]);
    let b = fpade(&["exponent", "--no-timings"]);
    assert_eq!(a.stdout, b.stdout);
    let timed = fpade(&["exponent"]);
    assert!(String::from_utf8_lossy(&timed.stdout).contains("timings"));
    assert!(!String::from_utf8_lossy(&a.stdout).contains("timings"));
}

#[test]
fn lemma_invocations_from_the_contract() {
    let out = fpade(&["verify-lemma", "binom-denominator", "--r", "6", "--kmax", "200", "--no-timings"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(all_pass(&report(&out)));

    let out = fpade(&[
        "verify-lemma", "pade-build", "--D", "10", "--eps0", "1/2", "--r", "2",
        "--b1", "2", "--b2", "4", "--M", "4", "--no-timings",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let witnesses: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["witness"].as_str().unwrap())
        .collect();
    assert!(witnesses.contains(&"order 25 target 25"));
}

#[test]
fn unknown_lemma_id_is_a_usage_error() {
    let out = fpade(&["verify-lemma", "not-a-lemma"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown lemma id"));
    assert!(err.contains("pade-build"));
}

#[test]
fn inadmissible_configs_are_usage_errors() {
    let out = fpade(&["pade", "--D", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree"));

    let out = fpade(&["scan", "--poly", "1,1", "--range", "1:10"]);
    assert_eq!(out.status.code(), Some(2));

    let out = fpade(&["scan", "--poly", "-1,0,1", "--range", "9:3"]);
    assert_eq!(out.status.code(), Some(2));

    let out = fpade(&["scan", "--poly", "-1,0,1", "--range", "1:50", "--primes", "9"]);
    assert_eq!(out.status.code(), Some(2));

    let out = fpade(&["omega", "--r", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn precision_comes_from_flag_then_env() {
    let prec_of = |out: &Output| {
        report(out)["config"]
            .as_array()
            .unwrap()
            .iter()
            .find(|e| e["key"] == "prec")
            .unwrap()["value"]
            .as_str()
            .unwrap()
            .to_string()
    };
    let out = fpade(&["exponent", "--no-timings"]);
    assert_eq!(prec_of(&out), "192");

    let out = Command::new(env!("CARGO_BIN_EXE_fpade"))
        .args(["exponent", "--no-timings"])
        .env("FPADE_PREC", "256")
        .output()
        .unwrap();
    assert_eq!(prec_of(&out), "256");

    let out = Command::new(env!("CARGO_BIN_EXE_fpade"))
        .args(["exponent", "--no-timings", "--prec", "320"])
        .env("FPADE_PREC", "256")
        .output()
        .unwrap();
    assert_eq!(prec_of(&out), "320");

    let out = Command::new(env!("CARGO_BIN_EXE_fpade"))
        .args(["exponent"])
        .env("FPADE_PREC", "banana")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_flag_writes_the_file_instead_of_stdout() {
    let path = tmp_path("report.json");
    let out = fpade(&["exponent", "--no-timings", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["command"], "exponent");
}

#[test]
fn omega_evaluates_at_a_point() {
    let out = fpade(&["omega", "--r", "2", "--beta", "4", "--len", "40", "--alpha", "1/97", "--no-timings"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(all_pass(&report(&out)));

    // 1 - 2 * (1/2) = 0: a pole of the product, a failed check.
    let out = fpade(&["omega", "--r", "2", "--beta", "4", "--alpha", "1/2", "--no-timings"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn derive_and_certify_pass_on_defaults() {
    let out = fpade(&["derive", "--kmax", "3", "--no-timings"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(all_pass(&report(&out)));

    let out = fpade(&["certify", "--no-timings"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(all_pass(&r));
    assert!(check_names(&r).iter().any(|n| n.contains("certificate")));
}

#[test]
fn pipeline_desk_verifies_all_properties() {
    let out = fpade(&["pipeline", "--D", "15", "--n0", "97", "--threads", "1", "--no-timings"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(all_pass(&r));
    let names = check_names(&r);
    assert!(names.contains(&"residuals below tail chain".to_string()));
    assert!(names.contains(&"matrix nonsingular".to_string()));
}

#[test]
fn pipeline_paper_gates_reject_small_magnitudes() {
    let out = fpade(&["pipeline", "--mode", "paper", "--N", "1000000", "--theta", "1/10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta outside"));

    let out = fpade(&["pipeline", "--mode", "paper", "--N", "1000000", "--theta", "1/50"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate parameters"));

    let out = fpade(&["pipeline", "--mode", "paper", "--theta", "1/100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--N"));
}
