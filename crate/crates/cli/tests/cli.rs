use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dcbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcbm")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const PARAMS: &str = r#"{
  "n": 40, "k": 2,
  "theta": {"constant": {"value": 1.0}},
  "B": [[0.6, 0.05], [0.05, 0.6]],
  "z": {"sizes": [20, 20]},
  "seed": 3
}"#;

#[test]
fn generate_then_detect() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.json");
    std::fs::write(&params, PARAMS).unwrap();
    let graph = dir.path().join("g.txt");
    let truth = dir.path().join("z.txt");
    let out = dcbm(&["generate", "--params", path(&params), "--out", path(&graph), "--labels-out", path(&truth)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    for method in ["init", "refine", "refine10", "provable", "score"] {
        let labels = dir.path().join(format!("{method}.txt"));
        let out = dcbm(&[
            "detect", "--graph", path(&graph), "--k", "2", "--method", method,
            "--truth", path(&truth), "--out", path(&labels),
        ]);
        assert!(out.status.success(), "{method}: {}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["n"], 40);
        assert_eq!(v["loss"].as_f64().unwrap(), 0.0, "{method}");
        assert_eq!(std::fs::read_to_string(&labels).unwrap().lines().count(), 40);
    }

    let out = dcbm(&["detect", "--graph", path(&graph), "--k", "2"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 40);
}

#[test]
fn detect_mle_needs_p_and_q() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    std::fs::write(&graph, "n 6\n0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n").unwrap();
    let out = dcbm(&["detect", "--graph", path(&graph), "--k", "2", "--method", "mle"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dcbm(&["detect", "--graph", path(&graph), "--k", "2", "--method", "mle", "--p", "0.9", "--q", "0.1"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1\n1\n1\n2\n2\n2\n");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.txt");
    assert_eq!(dcbm(&["detect", "--graph", path(&missing), "--k", "2"]).status.code(), Some(2));
    assert_eq!(dcbm(&["frobnicate"]).status.code(), Some(2));
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "n 3\n0 0\n").unwrap();
    assert_eq!(dcbm(&["detect", "--graph", path(&bad), "--k", "2"]).status.code(), Some(2));
    let out = dir.path().join("out.csv");
    let code = dcbm(&["simulate", "--preset", "scenario9", "--out", path(&out)]).status.code();
    assert_eq!(code, Some(2));
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "n 4\n").unwrap();
    let code = dcbm(&["detect", "--graph", path(&empty), "--k", "2", "--method", "refine"]).status.code();
    assert_eq!(code, Some(3));
}

#[test]
fn testlab_reports_error_and_bound() {
    let out = dcbm(&["testlab", "--m", "30", "--p", "0.2", "--q", "0.05", "--reps", "2000", "--seed", "4"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let (error, se, bound) = (v["error"].as_f64().unwrap(), v["se"].as_f64().unwrap(), v["bound"].as_f64().unwrap());
    assert!((bound - 2.0 * (-1.5f64).exp()).abs() < 1e-12);
    assert!(error <= bound + 3.0 * se);
    let lrt = dcbm(&["testlab", "--m", "30", "--p", "0.2", "--q", "0.05", "--reps", "2000", "--seed", "4", "--test", "lrt"]);
    assert!(lrt.status.success());
    assert_eq!(dcbm(&["testlab", "--m", "3", "--p", "0.2", "--q", "0.5"]).status.code(), Some(2));
}

#[test]
fn info_reports_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.json");
    std::fs::write(&params, PARAMS).unwrap();
    let out = dcbm(&["info", "--params", path(&params)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let gap = (0.6f64.sqrt() - 0.05f64.sqrt()).powi(2);
    let j = v["J"].as_f64().unwrap();
    assert!((j - 20.0 * gap).abs() < 1e-9, "{v}");
}

#[test]
fn simulate_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(
        &config,
        r#"{"name": "tiny", "n": 40, "k": 2, "sizes": [20, 20], "p": 0.5, "q": 0.05,
            "theta_law": {"constant": {"value": 1.0}}, "repetitions": 3, "seed": 9,
            "methods": ["init", "refine10"]}"#,
    )
    .unwrap();
    let (csv, svg, summary) = (dir.path().join("o.csv"), dir.path().join("o.svg"), dir.path().join("s.json"));
    let out = dcbm(&[
        "simulate", "--config", path(&config), "--out", path(&csv), "--svg", path(&svg), "--summary", path(&summary),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 7);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg") || std::fs::read_to_string(&svg).unwrap().starts_with("<?xml"));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s.as_array().unwrap().len(), 2);
}
