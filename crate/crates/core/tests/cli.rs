use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hadamard-prox"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn example(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, config: &Value) {
    std::fs::write(dir.join(name), config.to_string()).unwrap();
}

#[test]
fn run_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", &example("euclidean_ppa.json"));
    let out = run(&["run", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let printed: Value = serde_json::from_slice(&out.stdout).unwrap();
    let written: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/euclidean_ppa.json")).unwrap()).unwrap();
    assert_eq!(printed, written);
    assert_eq!(printed["stop_reason"], "residual");
    assert!(printed["final_dist_ref"].as_f64().unwrap() < 1e-6);
    let csv = std::fs::read_to_string(dir.path().join("out/euclidean_ppa.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("n,lambda,alpha,residual,step,dist_ref"));
}

#[test]
fn overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", &example("euclidean_ppa.json"));
    let out = run(&["run", "c.json", "--max-iter", "5"], dir.path());
    let s: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((s["iterations"].as_u64(), s["stop_reason"].as_str()), (Some(5), Some("max_iter")));
    let out = run(&["run", "c.json", "--tol", "1e-3"], dir.path());
    let s: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(s["iterations"].as_u64().unwrap() < 15);
}

#[test]
fn validation_errors_exit_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = example("half_plane_ppa.json");
    c["problem"] = json!({"field": {"kind": "affine_map", "matrix": [[1.0, 0.0], [0.0, 1.0]], "offset": [0.0, 0.0]}});
    write(dir.path(), "bad.json", &c);
    let out = run(&["run", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("problem.field"), "{err}");
    assert!(!dir.path().join("out").exists());

    assert_eq!(run(&["run", "missing.json"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["check", "bad.json"], dir.path()).status.code(), Some(1));
}

#[test]
fn solver_failure_exits_2_with_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = example("euclidean_ppa.json");
    c["problem"] = json!({"field": {"kind": "constant_map", "offset": [1e100]}});
    c["algorithm"]["schedule"]["lambda"] = json!({"rule": "explicit", "values": [1.0, 1.0, 1.0, 1e100]});
    write(dir.path(), "c.json", &c);
    let out = run(&["run", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let csv = std::fs::read_to_string(dir.path().join("out/euclidean_ppa.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let s: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(s["status"], "failed");
}

#[test]
fn check_prints_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = example("euclidean_ppa.json");
    c["algorithm"]["schedule"]["lambda"] = json!({"rule": "power", "scale": 1.0, "exponent": -2.0});
    c["algorithm"]["max_iter"] = json!(1000);
    write(dir.path(), "c.json", &c);
    let out = run(&["check", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let reports: Value = serde_json::from_slice(&out.stdout).unwrap();
    let conv = reports
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["regime"] == "ppa_convergence")
        .unwrap();
    assert_eq!(conv["verdict"], "violated");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn suite_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(&["suite", "algorithms", "--samples", "5", "--seed", "11"], dir.path());
    let b = run(&["suite", "algorithms", "--samples", "5", "--seed", "11", "--report", "r.json"], dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = std::fs::read(dir.path().join("r.json")).unwrap();
    assert_eq!(report, b.stdout);
}

#[test]
fn suite_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["suite", "all", "--samples", "0", "--seed", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert_eq!(run(&["suite", "bogus"], dir.path()).status.code(), Some(1));
}
