// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirrorcool")).args(args).output().unwrap()
}

fn run_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn derive_reports_room_temperature_scales() {
    let cfg = config("room_temperature.json");
    let v = run_json(&["derive", "--config", cfg.to_str().unwrap()]);
    let rate = v["coupling"]["Gamma"].as_f64().unwrap();
    let chi = v["coupling"]["chi"].as_f64().unwrap();
    assert!((rate - 207.2).abs() < 0.1, "{rate}");
    assert!((1e4..2e4).contains(&chi.abs()), "{chi}");
    assert_eq!(v["stability"]["stable"], true);
}

#[test]
fn unstable_phase_is_reported_not_fatal() {
    let cfg = config("unstable_phase.json");
    let out = run(&["derive", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["stability"]["stable"], false);

    let out = run(&["variance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn missing_mass_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(config("room_temperature.json")).unwrap()).unwrap();
    v["setup"].as_object_mut().unwrap().remove("m");
    let path = dir.path().join("no_mass.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = run(&["derive", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`m`"), "{}", stderr(&out));
}

#[test]
fn unknown_field_and_bad_flag_combinations_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("typo.json");
    std::fs::write(&path, r#"{"setup": null, "bogus": 1}"#).unwrap();
    assert_eq!(run(&["derive", "--config", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["derive", "--fig1"]).status.code(), Some(2));
    assert_eq!(run(&["variance", "--seed", "3"]).status.code(), Some(2));
}

#[test]
fn fig1_csv_has_the_five_gain_columns_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&["spectrum", "--fig1", "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().next().unwrap(), "omega,S_g0,S_g1,S_g10,S_g100,S_g1000");
    assert_eq!(text.lines().count(), 4002);
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(dir.path().join("a.sum_rule.csv").exists());
}

#[test]
fn simulate_is_seeded_and_writes_its_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("desk_langevin.json");
    let dir_path = |name: &str| dir.path().join(name);
    for name in ["a.json", "b.json"] {
        let out = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "5",
            "--out",
            dir_path(name).to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let a = std::fs::read_to_string(dir_path("a.json")).unwrap();
    assert_eq!(a, std::fs::read_to_string(dir_path("b.json")).unwrap());
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["sim"]["seed"], 5);
    let psd = std::fs::read_to_string(dir_path("a.psd.csv")).unwrap();
    assert!(psd.starts_with("omega,"));
}

#[test]
fn fock_refuses_hot_states() {
    let out = run(&["fock", "--config", config("room_temperature.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("n_bar"), "{}", stderr(&out));
}

#[test]
fn sweep_rows_follow_the_gain_list() {
    let out = run(&[
        "sweep",
        "--config",
        config("room_temperature.json").to_str().unwrap(),
        "--g-list",
        "0,1,10,100",
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let gains: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(gains, [0.0, 1.0, 10.0, 100.0]);
    let var_x: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(10).unwrap().parse().unwrap()).collect();
    assert!(var_x.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn variance_json_lists_each_method() {
    let v = run_json(&["variance", "--config", config("room_temperature.json").to_str().unwrap()]);
    let methods: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r["method"].as_str().unwrap()).collect();
    assert!(methods.contains(&"closed_form"));
    assert!(methods.contains(&"lyapunov"));
}
