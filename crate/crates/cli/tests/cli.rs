use std::process::{Command, Output};

use serde_json::Value;

fn sextic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sextic")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn field_descriptor() {
    let out = sextic(&["--json", "field", "--p", "7", "--d", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["delta_F"], "-153664");
    assert_eq!(v["t"], 1);
    assert_eq!(v["n"], 28);
    assert_eq!(v["gram"].as_array().unwrap().len(), 6);
}

#[test]
fn units_json() {
    let v = json(&sextic(&["units", "--p", "7", "--json"]));
    assert!((v["lambda"].as_f64().unwrap() - 1.44975).abs() < 1e-4);
    assert_eq!(v["fundamental_units"].as_array().unwrap().len(), 2);
    let v = json(&sextic(&["units", "--p", "31", "--json"]));
    assert!((v["regulator"].as_f64().unwrap() - 12.196).abs() < 1e-3);
}

#[test]
fn short_vectors_csv() {
    let out = sextic(&["short-vectors", "--p", "7", "--d", "7", "--bound", "6"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("norm,coord1,coord2,coord3,coord4,coord5,coord6"));
    // the 14 roots of unity, one per sign
    assert_eq!(lines.count(), 7);
}

#[test]
fn theta_at_origin() {
    let v = json(&sextic(&["theta", "--p", "7", "--d", "7", "--json"]));
    assert_eq!(v["counts"]["s1"], 14);
    let k0 = v["k0"].as_f64().unwrap();
    assert!(k0 > 1.0 + 14.0 * (-6.0 * std::f64::consts::PI).exp());
    for key in ["u", "w", "tail", "h0", "sigma1", "sigma2", "sigma3"] {
        assert!(!v[key].is_null(), "{key}");
    }
}

#[test]
fn scan_torus_exit_codes() {
    let out = sextic(&["--json", "scan-torus", "--p", "9", "--d", "3", "--n1", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["max_location"][0], 0.0);
    assert_eq!(v["max_at_origin"], true);
    // single precision cannot resolve the margin
    let out = sextic(&["--precision", "24", "scan-torus", "--p", "7", "--d", "7", "--n1", "16"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(sextic(&["field", "--p", "11", "--d", "1"]).status.code(), Some(2));
    assert_eq!(sextic(&["field", "--p", "7", "--d", "4"]).status.code(), Some(2));
    assert_eq!(sextic(&["--precision", "40", "units", "--p", "7"]).status.code(), Some(2));
    assert_eq!(sextic(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(sextic(&["scan-torus", "--p", "7", "--d", "7", "--n1", "8"]).status.code(), Some(2));
}

#[test]
fn verify_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = sextic(&["verify", "--only", "table1.*", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 42);
    assert!(v["meta"]["timestamp"].is_null());
    assert_eq!(v["meta"]["config"]["only"], "table1.*");
}

#[test]
fn verify_failure_block_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tails.csv");
    let out = sextic(&["verify", "--only", "tail.*", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("tail.t2_second,") && l.contains(",false,")));

    let out = sextic(&["--json", "verify", "--only", "tail.t2_*"]);
    let v = json(&out);
    assert_eq!(v["summary"]["failed"].as_array().unwrap().len(), 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# scan settings\ngrid = 16\nscan_fields = 7,7\nonly = disc.*\nthreads = 2\n").unwrap();
    let out = sextic(&["--json", "--config", cfg.to_str().unwrap(), "verify", "--only", "scan.*"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["meta"]["config"]["grid"], "16");
    assert_eq!(v["scans"][0]["grid"][0], 16);
    assert_eq!(v["checks"].as_array().unwrap().len(), 2);

    std::fs::write(&cfg, "grid: 16\n").unwrap();
    assert_eq!(sextic(&["--config", cfg.to_str().unwrap(), "verify"]).status.code(), Some(2));
}
