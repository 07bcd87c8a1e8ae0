use std::process::{Command, Output};

use serde_json::Value;

fn coinwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coinwalk")).args(args).output().expect("spawn coinwalk")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("structured report")
}

#[test]
fn config_file_drives_regular_transfer() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("walk.toml");
    std::fs::write(
        &path,
        "protocol = \"transfer-regular\"\n\n[arena]\nn = 9\nd = 3\ntarget = 4\n\n[input]\nrandom = true\nseed = 7\n",
    )
    .unwrap();
    let out = coinwalk(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["transfer"]["steps"], 18);
    assert_eq!(report["config"]["seed"], 7);
    assert_eq!(report["verdict"], "pass");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("walk.toml");
    std::fs::write(&path, "[arena]\ntarget = 3\n").unwrap();
    let out = coinwalk(&["transfer-line", "--config", path.to_str().unwrap(), "--target", "-5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["transfer"]["target"], -5);
}

#[test]
fn report_written_to_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = coinwalk(&["teleport-complete", "--d", "3", "--t", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");
}

#[test]
fn csv_trace_rows() {
    let out = coinwalk(&["transfer-line", "--x", "-1", "--input", "1,0", "0,0", "--trace", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,position,coin1,coin2,re,im"));
    assert_eq!(lines.next().unwrap(), "0,0,0,0,1.0000000000000000e0,0.0000000000000000e0");
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == 6));
}

#[test]
fn exit_codes() {
    assert_eq!(coinwalk(&["transfer-line", "--target", "3", "--input", "0.6,0", "0.8,0"]).status.code(), Some(0));
    assert_eq!(coinwalk(&["transfer-line", "--target", "2", "--place", "1=X"]).status.code(), Some(1));
    assert_eq!(coinwalk(&["teleport-complete", "--d", "4", "--t", "2"]).status.code(), Some(2));
    assert_eq!(coinwalk(&["transfer-complete", "--d", "3", "--target", "0"]).status.code(), Some(2));
    assert_eq!(coinwalk(&["teleport-cycle", "--d", "6"]).status.code(), Some(2));
    assert_eq!(coinwalk(&["run"]).status.code(), Some(2));
}

#[test]
fn unknown_config_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[arena]\nradius = 3\n").unwrap();
    let out = coinwalk(&["transfer-line", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config"));
}

#[test]
fn sampled_branch_is_seeded() {
    let args = ["teleport-regular", "--n", "8", "--d", "3", "--t", "3", "--sample", "--seed", "11"];
    let a = coinwalk(&args);
    let b = coinwalk(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let sampled = &json(&a)["teleport"]["sampled"];
    assert!(sampled["probability"].as_f64().unwrap() > 0.0);
    assert!((sampled["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}
