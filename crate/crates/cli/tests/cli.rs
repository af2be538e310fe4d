use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn trinode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trinode")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn classify_saddle_region() {
    let out = trinode(&["--json", "classify", "-m", "0", "-n", "-1", "-k", "0"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["command"], "classify");
    assert_eq!(r["outputs"]["tuple"]["i1"], 2);
    assert_eq!(r["outputs"]["label"], "(V10)");
    let saddle = &r["outputs"]["points"][1];
    assert_eq!(saddle["kind"], "saddle");
    assert_eq!(saddle["place"]["y"], 1.0);
}

#[test]
fn classify_contact_curve_point() {
    let out = trinode(&["--json", "classify", "-m", "-5/2", "-n", "-9/4", "-k", "1"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["outputs"]["label"], "{1.3L2}");
    let on: Vec<&str> = r["outputs"]["on_surfaces"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(on.contains(&"mu") && on.contains(&"T4"), "{on:?}");
}

#[test]
fn negative_k_is_a_usage_error() {
    let out = trinode(&["classify", "-m", "0", "-n", "0", "-k", "-1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("negative"));
}

#[test]
fn unclassifiable_point_is_inconclusive() {
    // The nilpotent infinite point on μ = T4 = 0 at k = 3.
    let out = trinode(&["--json", "classify", "-m", "-13/6", "-n", "-17/4", "-k", "3"]);
    assert_eq!(code(&out), 4);
    assert!(!json(&out)["diagnostics"].as_array().unwrap().is_empty());
}

#[test]
fn decimal_input_warns() {
    let out = trinode(&["classify", "-m", "0.0", "-n", "-1", "-k", "0"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("1e-12"));
}

#[test]
fn verify_scopes() {
    let lemmas = trinode(&["--json", "verify", "--scope", "lemmas"]);
    assert_eq!(code(&lemmas), 0);
    let tables = trinode(&["--json", "verify", "--scope", "tables"]);
    assert_eq!(code(&tables), 0);
    assert_eq!(json(&tables)["outputs"].as_array().unwrap().len(), 4);
    // The closed-form conic does not certify; the return-map parity checks pass.
    let prop8 = trinode(&["--json", "verify", "--scope", "prop8"]);
    assert_eq!(code(&prop8), 3);
    let checks = json(&prop8)["outputs"].as_array().unwrap().clone();
    let parity: Vec<bool> = checks
        .iter()
        .filter(|c| c["name"].as_str().unwrap().starts_with("return-map"))
        .map(|c| c["passed"].as_bool().unwrap())
        .collect();
    assert_eq!(parity, [true, true]);
}

#[test]
fn slice_writes_svg_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("k0");
    let out = trinode(&["slice", "-k", "0", "--resolution", "32", "--out", prefix.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let svg = std::fs::read_to_string(prefix.with_extension("svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("blue") && svg.contains("green"));
    let j: Value = serde_json::from_str(&std::fs::read_to_string(prefix.with_extension("json")).unwrap()).unwrap();
    assert!(!j["diagram"]["regions"].as_array().unwrap().is_empty());
}

#[test]
fn slice_algebraic_k_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let exact = |k: &str| {
        let out = trinode(&["--json", "slice", "-k", k, "--resolution", "32", "--out", dir.path().join("s").to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        json(&out)["outputs"]["exact_k"].as_bool().unwrap()
    };
    assert!(exact("sqrt8"));
    assert!(!exact("2.8284271247461903"));
}

#[test]
fn unwritable_output_fails() {
    let out = trinode(&["slice", "-k", "0", "--resolution", "16", "--out", "/nonexistent-dir/x"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn portrait_with_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("p.svg");
    let sk = dir.path().join("p.json");
    let out = trinode(&[
        "portrait", "-m", "-49/2", "-n", "-185/4", "-k", "12",
        "--out", svg.to_str().unwrap(), "--skeleton-json", sk.to_str().unwrap(), "--size", "300",
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("#d35400"), "cycle drawn");
    let j: Value = serde_json::from_str(&std::fs::read_to_string(&sk).unwrap()).unwrap();
    assert_eq!(j["limit_cycles"].as_array().unwrap().len(), 1);
}

fn atlas_run(dir: &Path, name: &str, threads: Option<&str>) -> Vec<u8> {
    let path = dir.join(name);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_trinode"));
    cmd.args(["atlas", "--k", "0,3", "--grid", "16", "--out", path.to_str().unwrap()]);
    match threads {
        Some(t) => cmd.env("TN_ATLAS_THREADS", t),
        None => cmd.env_remove("TN_ATLAS_THREADS"),
    };
    assert!(cmd.output().unwrap().status.success());
    std::fs::read(path).unwrap()
}

#[test]
fn atlas_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = atlas_run(dir.path(), "a.json", None);
    let b = atlas_run(dir.path(), "b.json", Some("1"));
    let c = atlas_run(dir.path(), "c.json", Some("3"));
    assert_eq!(a, b);
    assert_eq!(a, c);
    let j: Value = serde_json::from_slice(&a).unwrap();
    for s in j["outputs"]["slices"].as_array().unwrap() {
        for r in s["regions"].as_array().unwrap() {
            assert!(r["status"] != "classified" || r["label"].is_string());
        }
    }
}

#[test]
fn atlas_rejects_small_grid() {
    assert_eq!(code(&trinode(&["atlas", "--k", "0", "--grid", "8"])), 2);
}
