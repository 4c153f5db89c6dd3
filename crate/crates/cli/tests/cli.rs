use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(path: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(path)
}

fn nwa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nwa")).args(args).output().expect("nwa runs")
}

fn ok_json(out: Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn config() -> String {
    data("desk_example/config.json").display().to_string()
}

/// The desk-example config with `edit` applied, written into `dir`.
fn edited_config(dir: &Path, edit: impl FnOnce(&mut Value)) -> String {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(config()).unwrap()).unwrap();
    let src = data("desk_example");
    for key in ["load", "pv"] {
        if let Some(p) = v["scenarios"][key].as_str() {
            v["scenarios"][key] = src.join(p).display().to_string().into();
        }
    }
    edit(&mut v);
    let path = dir.join("config.json");
    std::fs::write(&path, v.to_string()).unwrap();
    path.display().to_string()
}

#[test]
fn sequential_plan_matches_golden_file() {
    let out = nwa(&["plan", &config(), "--technique", "sequential"]);
    assert!(out.status.success());
    let golden = std::fs::read_to_string(data("desk_example/golden_plan_sequential.json")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}

#[test]
fn techniques_agree_and_write_a_log() {
    let dir = tempfile::tempdir().unwrap();
    let plan_path = dir.path().join("plan.json");
    let out = nwa(&["plan", &config(), "--out", plan_path.to_str().unwrap()]);
    assert!(out.status.success());
    let dw: Value = serde_json::from_str(&std::fs::read_to_string(&plan_path).unwrap()).unwrap();
    let seq = ok_json(nwa(&["plan", &config(), "--technique", "sequential"]));
    let (a, b) = (dw["objective"].as_f64().unwrap(), seq["objective"].as_f64().unwrap());
    assert!((a - b).abs() <= 1e-4 * b.abs());
    assert_eq!(dw["technique"], "dwda");

    let log = std::fs::read_to_string(dir.path().join("plan.log.jsonl")).unwrap();
    let lines: Vec<Value> = log.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len() as u64, dw["iterations"].as_u64().unwrap());
    for key in ["iteration", "master_objective", "lower_bound", "gap", "proposals", "purged"] {
        assert!(lines[0].get(key).is_some(), "log lacks {key}");
    }
}

#[test]
fn gamma_override_changes_the_plan() {
    let nominal = ok_json(nwa(&["plan", &config(), "--technique", "sequential", "--gamma", "0"]));
    let robust = ok_json(nwa(&["plan", &config(), "--technique", "sequential", "--gamma", "1"]));
    assert_eq!(nominal["gamma"], 0.0);
    assert!(nominal["objective"].as_f64().unwrap() <= robust["objective"].as_f64().unwrap());
}

#[test]
fn negative_discount_rate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited_config(dir.path(), |v| v["capex"]["rho"] = (-0.05).into());
    let out = nwa(&["plan", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_config_is_an_error() {
    let out = nwa(&["plan", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn capex_reports_first_overload_year() {
    let dir = tempfile::tempdir().unwrap();
    let peaks = dir.path().join("peaks.csv");
    std::fs::write(&peaks, "year,value\n1,50\n2,58\n3,60\n4,62\n").unwrap();
    let r = ok_json(nwa(&["capex", &config(), "--peaks", peaks.to_str().unwrap()]));
    // limit 59 MW: years 1 and 2 fit, year 3 does not
    assert_eq!(r["delta"], 2);
    assert_eq!(r["lemma1_agrees"], true);
    let expected = 30e6 / 1.07f64.powi(2);
    assert!((r["present_cost"].as_f64().unwrap() - expected).abs() <= 1.0);

    std::fs::write(&peaks, "year,value\n1,50\n3,60\n").unwrap();
    assert_eq!(nwa(&["capex", &config(), "--peaks", peaks.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn assess_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let plan_path = dir.path().join("plan.json");
    let out = nwa(&["plan", &config(), "--technique", "sequential", "--out", plan_path.to_str().unwrap()]);
    assert!(out.status.success());
    let out_dir = dir.path().join("assessment");
    let summary = ok_json(nwa(&[
        "assess",
        &config(),
        "--plan",
        plan_path.to_str().unwrap(),
        "--draws",
        "40",
        "--out",
        out_dir.to_str().unwrap(),
    ]));
    assert_eq!(summary["draws_with_shed"], 0);
    let csv = std::fs::read_to_string(out_dir.join("assessment.csv")).unwrap();
    assert_eq!(csv.lines().count(), 41);
    assert!(out_dir.join("assessment.json").exists());
}

#[test]
fn sweep_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let s = ok_json(nwa(&[
        "sweep",
        &config(),
        "--gammas",
        "0",
        "--draws",
        "20",
        "--voll-grid",
        "0,1000",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(s["best_gamma"], 0.0);
    for f in ["sweep.json", "cost_vs_gamma.csv", "capacities.csv", "shed_distribution.csv", "gamma_vs_voll.csv"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
}

#[test]
fn sweep_without_levels_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = nwa(&["sweep", &config(), "--gammas", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn synth_writes_requested_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("load.csv");
    let out = nwa(&["synth", &config(), "--kind", "load", "--n", "5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().count() > 5);
}
