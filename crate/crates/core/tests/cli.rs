use std::process::Command;

use clap::Parser;
use serde_json::Value;

use towerdescent::cli::{run, Cli, EXIT_INVALID, EXIT_OK, WORKERS_ENV};

fn run_args(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["towerdescent"];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(&argv).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&cli, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn descend_q32_golden_line() {
    let (code, out, _) = run_args(&["descend", "--p", "2", "--n", "5"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("M_2 = T^8 + w^26*T^4 + w^16*T^2 + w^12*T"), "{out}");
    assert!(out.contains("W_2 = w^19"));
}

#[test]
fn bound_q4_n10() {
    let (code, out, _) = run_args(&["bound", "--q", "4", "--n", "10"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("uniform bound = 90"), "{out}");
}

#[test]
fn bound_with_curve_reports_conditions() {
    let (code, out, _) = run_args(&["bound", "--q", "4", "--n", "2", "--g", "0", "--n1", "5", "--n2", "0"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("mu bound = 6"), "{out}");
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["--format", "json", "descend", "--p", "3", "--n", "3", "--norms", "0,2"][..],
        &["count", "--p", "3", "--n", "2", "--i", "1"],
        &["tower", "--p", "2", "--n", "4", "--depth", "3"],
        &["--format", "json", "verify", "--seed", "5"],
    ] {
        assert_eq!(run_args(args), run_args(args));
    }
}

#[test]
fn json_round_trips() {
    for args in [
        &["--format", "json", "field", "--p", "2", "--n", "4"][..],
        &["--format", "json", "descend", "--p", "2", "--n", "4"],
        &["--format", "json", "tower", "--p", "3", "--n", "2", "--depth", "2"],
        &["--format", "json", "count", "--p", "2", "--n", "2", "--i", "1"],
        &["--format", "json", "bound", "--q", "5", "--n", "7"],
    ] {
        let (code, out, _) = run_args(args);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(again, out);
    }
}

#[test]
fn count_json_has_the_small_example() {
    let (_, out, _) = run_args(&["--format", "json", "count", "--p", "2", "--n", "2", "--i", "1"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["n1_over_fq"], 5);
    assert_eq!(v["n_over_fq2"], 33);
    assert_eq!(v["maximal"], true);
}

#[test]
fn invalid_parameters_exit_2_with_one_line() {
    for args in [
        &["descend", "--p", "4", "--n", "2"][..],
        &["descend", "--p", "2", "--n", "11"],
        &["descend", "--p", "2", "--n", "3", "--norms", "1"],
        &["descend", "--p", "3", "--n", "2", "--norms", "2"],
        &["field", "--p", "2", "--n", "3", "--modulus", "1,0,0,1"],
        &["bound", "--q", "6", "--n", "3"],
        &["count", "--p", "2", "--n", "2", "--i", "3"],
        &["tower", "--p", "2", "--n", "2", "--depth", "0"],
    ] {
        let (code, out, err) = run_args(args);
        assert_eq!(code, EXIT_INVALID, "{args:?}");
        assert!(out.is_empty());
        assert_eq!(err.lines().count(), 1, "{err}");
    }
}

#[test]
fn verify_passes() {
    let (code, out, _) = run_args(&["verify", "--seed", "11"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.trim_end().ends_with("0 failed (seed 11)"), "{out}");
}

#[test]
fn binary_exit_codes_and_worker_count() {
    let bin = env!("CARGO_BIN_EXE_towerdescent");
    let one = Command::new(bin).args(["count", "--p", "3", "--n", "2", "--i", "2"]).env(WORKERS_ENV, "1").output().unwrap();
    let many = Command::new(bin).args(["count", "--p", "3", "--n", "2", "--i", "2"]).env(WORKERS_ENV, "7").output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);

    let bad = Command::new(bin).args(["count", "--p", "3", "--n", "2", "--i", "1"]).env(WORKERS_ENV, "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let unknown = Command::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
}
