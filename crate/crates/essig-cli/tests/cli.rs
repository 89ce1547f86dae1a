//! End-to-end tests of the `essig` binary: the documented subcommand
//! behaviors, config validation, and byte-identical reruns.

use std::fs;
use std::process::{Command, Output};

fn essig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_essig"))
        .args(args)
        .output()
        .expect("spawn essig")
}

fn stdout_json(args: &[&str]) -> serde_json::Value {
    let out = essig(args);
    assert!(
        out.status.success(),
        "essig {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn disk_eval_center_gives_quarter() {
    let v = stdout_json(&["disk", "-N", "2", "--eval", "0", "0"]);
    assert_eq!(v["evaluation"]["levels"][2]["coeffs"]["11"], "1/4");
    assert_eq!(v["evaluation"]["levels"][2]["coeffs"]["22"], "1/4");
    assert!(v["evaluation"]["levels"][1]["coeffs"]
        .as_object()
        .unwrap()
        .is_empty());
}

#[test]
fn disk_eval_boundary_gives_unit() {
    let v = stdout_json(&["disk", "-N", "3", "--eval", "1", "0"]);
    let levels = v["evaluation"]["levels"].as_array().unwrap();
    assert_eq!(levels[0]["coeffs"][""], "1/1");
    for level in &levels[1..] {
        assert!(level["coeffs"].as_object().unwrap().is_empty());
    }
}

#[test]
fn disk_field_contains_reference_value() {
    let v = stdout_json(&["disk", "-N", "4"]);
    let level4 = &v["levels"][4]["coeffs"]["1111"];
    let has_quartic = level4
        .as_array()
        .unwrap()
        .iter()
        .any(|m| m["e1"] == 4 && m["e2"] == 0 && m["c"] == "-7/192");
    assert!(has_quartic, "expected -7/192 z1^4 in word 1111: {level4}");
}

#[test]
fn disk_transport_boundary_is_unit() {
    let v = stdout_json(&[
        "disk", "-N", "2", "--center", "1/2", "0", "--radius", "1/4", "--eval", "3/4", "0",
    ]);
    assert_eq!(v["evaluation"]["levels"][0]["coeffs"][""], "1/1");
    assert!(v["evaluation"]["levels"][2]["coeffs"]
        .as_object()
        .unwrap()
        .is_empty());
}

#[test]
fn interval_eval_matches_closed_form() {
    let v = stdout_json(&["interval", "-N", "4", "--eval", "0"]);
    assert_eq!(v["levels"][2], "1/2");
    assert_eq!(v["levels"][4], "1/24");
}

#[test]
fn lattice_single_point_domain() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("dom.txt");
    fs::write(&file, "1 4\n0\n").unwrap();
    let v = stdout_json(&["lattice", "--domain", file.to_str().unwrap()]);
    let levels = &v["field"]["0"]["levels"];
    assert_eq!(levels[2]["coeffs"]["11"], "1/2");
    assert_eq!(levels[4]["coeffs"]["1111"], "1/24");
    // -N overrides the header truncation
    let v = stdout_json(&["lattice", "--domain", file.to_str().unwrap(), "-N", "2"]);
    assert_eq!(v["truncation"], 2);
}

#[test]
fn sig_of_unit_segment_is_exponential() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("path.txt");
    fs::write(&file, "0 0 0\n1 1 0\n").unwrap();
    let v = stdout_json(&["sig", file.to_str().unwrap(), "-N", "3"]);
    assert_eq!(v["levels"][1]["coeffs"]["1"], 1.0);
    assert_eq!(v["levels"][2]["coeffs"]["11"], 0.5);
    assert_eq!(v["levels"][3]["coeffs"]["111"], 1.0 / 6.0);
}

#[test]
fn mc_output_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (out, threads) in [(&a, "2"), (&b, "1")] {
        let run = essig(&[
            "mc", "--paths", "600", "--dt", "0.002", "-N", "3", "--seed", "5",
            "--threads", threads, "-o", out.to_str().unwrap(),
        ]);
        assert!(run.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn check_suites_exit_zero() {
    for suite in ["meanvalue", "interval-oracle", "rotation"] {
        let out = essig(&["check", suite]);
        assert!(out.status.success(), "suite {suite} failed");
    }
    let out = essig(&["check", "chen", "--paths", "20", "--format", "json"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn invalid_config_exits_nonzero_with_one_line() {
    let cases: &[&[&str]] = &[
        &["mc", "--dt", "0"],
        &["mc", "--paths", "0"],
        &["mc", "--radius=-1"],
        &["mc", "--start", "5", "0"],
        &["disk", "--radius", "0", "--eval", "0", "0"],
        &["disk", "--eval", "2", "0"],
        &["interval", "--eval", "3"],
    ];
    for args in cases {
        let out = essig(args);
        assert!(!out.status.success(), "{args:?} should fail");
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(err.trim().lines().count(), 1, "diagnostic: {err}");
        assert!(err.starts_with("error:"), "diagnostic: {err}");
    }

    let missing = essig(&["lattice", "--domain", "/no/such/file"]);
    assert!(!missing.status.success());
}
