use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn gausscap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gausscap"))
        .args(args)
        .current_dir(dir)
        .env_remove("GAUSSCAP_HBAR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json document")
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("flat.json"), r#"{"kind":"flat","K":1,"N":0}"#).unwrap();
    fs::write(dir.path().join("noisy.json"), r#"{"kind":"flat","K":1,"N":0.5}"#).unwrap();
    fs::write(dir.path().join("exp.json"), r#"{"kind":"exponential-decay","K":1,"N0":1,"rate":1}"#).unwrap();
    fs::write(dir.path().join("modes.csv"), "omega,K_abs,N\n1.0,1.0,0.0\n2.0,0.5,1.0\n").unwrap();
    dir
}

#[test]
fn broadband_capacity_with_model_alias() {
    let dir = workspace();
    let doc = json(&gausscap(dir.path(), &["capacity", "broadband", "--profile", "flat.json", "--energy", "1", "--hbar", "1", "--model", "cq"]));
    let c = doc["result"]["capacity"].as_f64().unwrap();
    assert!((c - (std::f64::consts::PI / 3.0).sqrt()).abs() < 1e-6);
    assert_eq!(doc["config"]["command"]["capacity"]["broadband"]["model"], "classical-quantum");
    assert_eq!(doc["config"]["hbar"], 1.0);
}

#[test]
fn zero_budget_waterfill() {
    let dir = workspace();
    let doc = json(&gausscap(dir.path(), &["waterfill", "--modes", "modes.csv", "--energy", "0"]));
    assert_eq!(doc["result"]["capacity"], 0.0);
    assert!(doc["result"]["allocations"].as_array().unwrap().iter().all(|a| a == 0.0));
}

#[test]
fn converge_writes_a_shrinking_gap_column() {
    let dir = workspace();
    json(&gausscap(dir.path(), &["converge", "--profile", "flat.json", "--energy", "1", "--t", "10,100,1000,10000", "--csv", "trace.csv"]));
    let text = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("T,modes,cutoff,rate,theta,gap"));
    let gaps: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(gaps.len(), 4);
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = workspace();
    let args = ["converge", "--profile", "noisy.json", "--energy", "1", "--t", "50,200", "--delta", "0.05", "--out", "a.json"];
    assert!(gausscap(dir.path(), &args).status.success());
    let first = fs::read(dir.path().join("a.json")).unwrap();
    assert!(gausscap(dir.path(), &args).status.success());
    assert_eq!(first, fs::read(dir.path().join("a.json")).unwrap());
}

#[test]
fn hbar_comes_from_the_environment() {
    let dir = workspace();
    let out = Command::new(env!("CARGO_BIN_EXE_gausscap"))
        .args(["capacity", "broadband", "--profile", "flat.json", "--energy", "1"])
        .current_dir(dir.path())
        .env("GAUSSCAP_HBAR", "2")
        .output()
        .unwrap();
    let doc = json(&out);
    assert_eq!(doc["config"]["hbar"], 2.0);
    let c = doc["result"]["capacity"].as_f64().unwrap();
    assert!((c - (std::f64::consts::PI / 6.0).sqrt()).abs() < 1e-6);
}

#[test]
fn probes_certify_divergence() {
    let dir = workspace();
    let doc = json(&gausscap(dir.path(), &[
        "probe", "quantum", "--profile", "exp.json", "--energy", "1", "--omega1", "25,50,100", "--height-rule", "--threshold", "40",
    ]));
    assert_eq!(doc["result"]["strictly_increasing"], true);
    assert_eq!(doc["result"]["exceeds_threshold"], true);
    let last = doc["result"]["probes"][2]["lower_bound"].as_f64().unwrap();
    assert!((last - 50.0).abs() < 2.5);
}

#[test]
fn symplectic_and_vacuum_commands() {
    let dir = workspace();
    fs::write(dir.path().join("cov.csv"), "delta,xpxp\n1.5,0\n0,1.5\n").unwrap();
    let doc = json(&gausscap(dir.path(), &["symplectic", "williamson", "--covariance", "cov.csv"]));
    assert!((doc["result"]["lambdas"][0].as_f64().unwrap() - 1.5).abs() < 1e-12);

    let doc = json(&gausscap(dir.path(), &["symplectic", "kernel", "--profile", "flat.json", "--horizon", "10", "--grid", "64"]));
    assert!(doc["result"]["lambdas"].as_array().unwrap().iter().all(|l| (l.as_f64().unwrap() - 0.5).abs() < 1e-10));

    let doc = json(&gausscap(dir.path(), &["vacuum-form", "--f-params", "0,1", "--g-params", "0.2,1.2", "--slobodeckij"]));
    assert!(doc["result"]["relative_difference"].as_f64().unwrap() < 1e-4);
}

#[test]
fn validate_reports_problems_as_data() {
    let dir = workspace();
    fs::write(dir.path().join("bad.json"), r#"{"kind":"flat","K":0,"N":0}"#).unwrap();
    let doc = json(&gausscap(dir.path(), &["validate", "--profile", "bad.json", "--energy", "-1"]));
    let diags = doc["result"]["diagnostics"].as_array().unwrap();
    assert_eq!(diags.len(), 2);
    assert!(diags[0].as_str().unwrap().contains("gain must be positive"));
    let ok = json(&gausscap(dir.path(), &["validate", "--profile", "flat.json", "--modes", "modes.csv", "--energy", "1"]));
    assert_eq!(ok["result"]["runnable"], true);
}

#[test]
fn exit_codes_follow_error_categories() {
    let dir = workspace();
    fs::write(dir.path().join("broken.json"), "{ not json").unwrap();
    let code = |args: &[&str]| gausscap(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["capacity", "broadband", "--profile", "broken.json", "--energy", "1"]), 2);
    assert_eq!(code(&["capacity", "broadband", "--profile", "missing.json", "--energy", "1"]), 2);
    assert_eq!(code(&["capacity", "broadband", "--bogus"]), 2);
    assert_eq!(code(&["capacity", "broadband", "--profile", "flat.json", "--energy", "-1"]), 3);
    assert_eq!(code(&["capacity", "bandpass", "--profile", "noisy.json", "--energy", "1"]), 3);
    assert_eq!(code(&["capacity", "single-mode", "--model", "attenuator", "--k", "1.5", "--energy", "1"]), 3);
}
