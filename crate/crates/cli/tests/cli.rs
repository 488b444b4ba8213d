use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sptkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sptkit")).args(args).env("TOOL_THREADS", "2").output().expect("run sptkit")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// `μ(g, h) = (-1)^{b_g a_h}` for `g = a_g + 2 b_g`, as exact phase entries.
fn z2z2_nontrivial_cocycle() -> String {
    let entry = |g: usize, h: usize| if (g >> 1) & (h & 1) == 1 { r#"{"num":1,"den":2}"# } else { r#"{"num":0,"den":1}"# };
    let rows: Vec<String> = (0..4).map(|g| format!("[{}]", (0..4).map(|h| entry(g, h)).collect::<Vec<_>>().join(","))).collect();
    format!(r#"{{"group":"Z2xZ2","phases":[{}]}}"#, rows.join(","))
}

#[test]
fn h2_of_klein_group() {
    let out = sptkit(&["cohomology", "h2", "--group", "Z2xZ2"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["divisors"], serde_json::json!([2]));
    let out = sptkit(&["cohomology", "h2", "--group", "z3xz3"]);
    assert_eq!(stdout_json(&out)["divisors"], serde_json::json!([3]));
    let out = sptkit(&["cohomology", "h2", "--group", "Z5"]);
    assert_eq!(stdout_json(&out)["divisors"], serde_json::json!([]));
}

#[test]
fn manifest_is_one_json_line_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let cocycle = dir.path().join("mu.json");
    std::fs::write(&cocycle, z2z2_nontrivial_cocycle()).unwrap();
    let out = sptkit(&["cocycle", "check", "--cocycle", path_str(&cocycle)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let manifest: Value = serde_json::from_str(stderr.lines().next().unwrap()).unwrap();
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(manifest["tolerances"]["snap"].is_number());
    assert!(manifest["wall_time_s"].is_number());
}

#[test]
fn cocycle_check_and_classify() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, z2z2_nontrivial_cocycle()).unwrap();
    let out = sptkit(&["cocycle", "classify", "--cocycle", path_str(&good)]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["trivial"], false);
    assert_eq!(v["coords"], serde_json::json!([1]));

    // A single -1 at (1, 1) breaks the cocycle condition at (1, 1, 2).
    let bad = dir.path().join("bad.json");
    let mut rows = vec![vec![r#"{"num":0,"den":1}"#; 4]; 4];
    rows[1][1] = r#"{"num":1,"den":2}"#;
    let rows: Vec<String> = rows.iter().map(|r| format!("[{}]", r.join(","))).collect();
    std::fs::write(&bad, format!(r#"{{"group":"Z2xZ2","phases":[{}]}}"#, rows.join(","))).unwrap();
    let out = sptkit(&["cocycle", "check", "--cocycle", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["cocycle"], false);
    assert!(v["violation_count"].as_u64().unwrap() > 0);
}

#[test]
fn product_state_is_trivial_and_aklt_is_haldane() {
    let dir = tempfile::tempdir().unwrap();
    let product = dir.path().join("product.json");
    assert!(sptkit(&["state", "build", "--kind", "product", "--out", path_str(&product)]).status.success());
    let v = stdout_json(&sptkit(&["index", "compute", "--state", path_str(&product)]));
    assert_eq!(v["trivial"], true);

    let aklt = dir.path().join("aklt.json");
    assert!(sptkit(&["state", "build", "--kind", "aklt", "--out", path_str(&aklt)]).status.success());
    let out = sptkit(&["index", "compute", "--state", path_str(&aklt), "--detector", "so3"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "haldane");
    assert_eq!(v["trivial"], false);
}

#[test]
fn fixed_point_state_from_cocycle() {
    let dir = tempfile::tempdir().unwrap();
    let cocycle = dir.path().join("mu.json");
    let state = dir.path().join("fp.json");
    std::fs::write(&cocycle, z2z2_nontrivial_cocycle()).unwrap();
    let out = sptkit(&["state", "build", "--kind", "fixed-point", "--cocycle", path_str(&cocycle), "--out", path_str(&state)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&sptkit(&["index", "compute", "--state", path_str(&state)]));
    assert_eq!(v["coords"], serde_json::json!([1]));

    let missing = sptkit(&["state", "build", "--kind", "fixed-point", "--out", path_str(&state)]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn charge_transfer_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let charges = dir.path().join("q.json");
    let circuit = dir.path().join("c.json");
    std::fs::write(&charges, r#"{"group": "Z4", "exponents": [1, 2, 3, 0]}"#).unwrap();
    let out = sptkit(&["circuit", "charge-transfer", "--charges", path_str(&charges), "--length", "4", "--out", path_str(&circuit)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["window_trivial"], true);
    assert_eq!(v["overlap_defect"], "0.000e0");
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&circuit).unwrap()).unwrap();
    assert!(!written["gates"].as_array().unwrap().is_empty());

    let odd = sptkit(&["circuit", "charge-transfer", "--charges", path_str(&charges), "--length", "3", "--out", path_str(&circuit)]);
    assert_eq!(odd.status.code(), Some(1));
    let long = sptkit(&["circuit", "charge-transfer", "--charges", path_str(&charges), "--length", "26", "--out", path_str(&circuit)]);
    assert_eq!(long.status.code(), Some(4));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"label\": \"x\",\n  \"group\": ,\n}").unwrap();
    let out = sptkit(&["index", "compute", "--state", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 3"), "{stderr}");
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_group_is_a_validation_error() {
    let out = sptkit(&["group", "show", "--group", "Z2xQ17"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ffunction_reports_axioms() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let out = sptkit(&["locality", "ffunction", "--decay", "exp:1.0", "--rmax", "100", "--out", path_str(&f)]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["non_increasing"], true);
    assert_eq!(v["dominates_shifted_decay"], true);
    assert!(f.exists());
    let bad = sptkit(&["locality", "ffunction", "--decay", "poly:2", "--out", path_str(&f)]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn stdout_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("cluster.json");
    sptkit(&["state", "build", "--kind", "cluster", "--out", path_str(&state)]);
    let a = sptkit(&["index", "compute", "--state", path_str(&state)]);
    let b = sptkit(&["index", "compute", "--state", path_str(&state)]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
