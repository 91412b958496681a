//! End-to-end tests of the cellcov binary: spec'd example invocations, exit
//! codes, output schemas, and config round-tripping.

use std::path::PathBuf;
use std::process::{Command, Output};

fn cellcov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellcov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("cellcov-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn downlink_single_threshold_closed_form() {
    let out = cellcov(&[
        "downlink", "--alpha", "4", "--snr-db", "inf", "--tau-db", "0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "tau_db,tau_linear,coverage");
    let row = lines.next().unwrap();
    let coverage: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((coverage - 0.560099).abs() < 1e-6, "coverage {coverage}");
    assert!(lines.next().is_none(), "single-row output expected");
}

#[test]
fn hetnet_inst_example_value() {
    let out = cellcov(&[
        "hetnet",
        "--rule",
        "inst",
        "--tiers",
        "1e-6,100,2;1e-5,1,2",
        "--alpha",
        "4",
        "--no-noise",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let coverage: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert!((coverage - 0.450158).abs() < 1e-6, "coverage {coverage}");
}

#[test]
fn malformed_grid_exits_one_without_output() {
    let path = tmp("bad-grid.csv");
    let _ = std::fs::remove_file(&path);
    let out = cellcov(&[
        "downlink",
        "--tau-db",
        "10:-1:0",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!path.exists(), "no output file may be written on exit 1");
}

#[test]
fn unknown_flag_exits_one() {
    let out = cellcov(&["downlink", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn hetnet_inst_low_tau_rejected_for_analytics_but_simulates() {
    let analytic = cellcov(&[
        "hetnet",
        "--rule",
        "inst",
        "--tiers",
        "1,1,0.9",
        "--no-noise",
    ]);
    assert_eq!(analytic.status.code(), Some(1));
    let err = String::from_utf8_lossy(&analytic.stderr).into_owned();
    assert!(err.contains("above 1"), "diagnostic: {err}");

    let sim = cellcov(&[
        "hetnet",
        "--rule",
        "inst",
        "--tiers",
        "1,1,0.9",
        "--no-noise",
        "--mode",
        "simulate",
        "--trials",
        "500",
    ]);
    assert!(sim.status.success(), "simulate mode must accept tau < 1");
}

#[test]
fn simulate_json_embeds_resolved_config_and_reruns_identically() {
    let json_path = tmp("sim.json");
    let out = cellcov(&[
        "downlink",
        "--mode",
        "simulate",
        "--trials",
        "2000",
        "--seed",
        "11",
        "--tau-db",
        "-4:4:8",
        "--format",
        "json",
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(doc["config"]["seed"], 11);
    let radius = doc["config"]["window_radius"].as_f64().unwrap();
    assert!(radius > 0.0);
    assert_eq!(doc["estimate"]["trials"], 2000);

    // Feed the embedded config back in; the artifact must be identical.
    let cfg_path = tmp("rerun.json");
    std::fs::write(&cfg_path, doc["config"].to_string()).unwrap();
    let rerun_path = tmp("rerun-out.json");
    let out = cellcov(&[
        "downlink",
        "--config",
        cfg_path.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        rerun_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc2: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&rerun_path).unwrap()).unwrap();
    assert_eq!(doc["estimate"], doc2["estimate"]);
}

#[test]
fn config_flag_conflicts_with_parameter_flags() {
    let cfg_path = tmp("conflict.json");
    std::fs::write(
        &cfg_path,
        r#"{"scenario":"downlink","mode":"analytic","grid":{"start_db":0.0,"step_db":1.0,"stop_db":0.0}}"#,
    )
    .unwrap();
    let out = cellcov(&[
        "downlink",
        "--config",
        cfg_path.to_str().unwrap(),
        "--alpha",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn strict_config_rejects_unknown_keys() {
    let cfg_path = tmp("typo.json");
    std::fs::write(
        &cfg_path,
        r#"{"scenario":"downlink","mode":"analytic","alhpa":4.0,"grid":{"start_db":0.0,"step_db":1.0,"stop_db":0.0}}"#,
    )
    .unwrap();
    let out = cellcov(&["downlink", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("alhpa"), "unknown key named in: {err}");
}

#[test]
fn uplink_preset_full_inversion_value() {
    let out = cellcov(&["uplink", "--preset", "fig5-uplink", "--tau-db", "0"]);
    assert!(out.status.success());
    let coverage: f64 = stdout(&out)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    // exp(-pi/4) under full channel inversion.
    assert!((coverage - 0.4559381).abs() < 1e-5, "coverage {coverage}");
}

#[test]
fn validate_mode_emits_report_and_exit_three_on_failure() {
    // An absurdly tight tolerance forces a validation failure; the report
    // must still be written.
    let path = tmp("tight.json");
    let out = cellcov(&[
        "downlink",
        "--mode",
        "validate",
        "--trials",
        "2000",
        "--seed",
        "5",
        "--tau-db",
        "0",
        "--tol",
        "1e-9",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["pass"], false);
    assert!(doc["report"]["max_abs_gap"].as_f64().unwrap() > 1e-9);
}

#[test]
fn sweep_produces_long_format_csv() {
    let path = tmp("sweep.csv");
    let out = cellcov(&[
        "sweep",
        "--scenario",
        "downlink",
        "--vary",
        "alpha=3,4",
        "--tau-db",
        "0",
        "--mode",
        "analytic",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,tau_db,tau_linear,coverage");
    assert_eq!(lines.len(), 3, "two sweep points, one row each");
    // alpha = 4 row carries the known closed-form value.
    let last: Vec<&str> = lines[2].split(',').collect();
    let coverage: f64 = last[3].parse().unwrap();
    assert!((coverage - 0.560099).abs() < 1e-6);
}

#[test]
fn validate_suite_scenario_passes() {
    let out = cellcov(&["validate", "--only", "dl-nonoise-a4", "--trials", "4000"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("PASS dl-nonoise-a4"), "{text}");
}

#[test]
fn validate_full_suite_exits_zero() {
    let path = tmp("suite.json");
    let out = cellcov(&["validate", "--out", path.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "suite failed:\n{}{}",
        stdout(&out),
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    for name in [
        "dl-nonoise-a4",
        "dl-snr10-a4",
        "ul-full-inversion",
        "hetnet-avg-equal-tau",
        "hetnet-inst-tau2",
    ] {
        assert!(text.contains(&format!("PASS {name}")), "{text}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.as_array().unwrap().len(), 5);
}

#[test]
fn validate_suite_rejects_unknown_scenario() {
    let out = cellcov(&["validate", "--only", "not-a-scenario"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_values_carry_full_precision() {
    let out = cellcov(&["downlink", "--alpha", "4", "--no-noise", "--tau-db", "0"]);
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let printed = row.split(',').nth(2).unwrap();
    // 17 significant digits: parsing back reproduces the f64 exactly.
    let parsed: f64 = printed.parse().unwrap();
    let expect = 1.0 / (1.0 + std::f64::consts::PI / 4.0);
    assert_eq!(parsed, expect, "printed {printed}");
}
