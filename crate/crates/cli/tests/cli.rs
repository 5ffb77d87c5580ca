use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_collapse-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const UNIPOTENT: &str = r#"{
    "base": {"kind": "circle", "resolution": 16, "circumferences": [1]},
    "algebra": {"preset": "abelian:2"},
    "monodromy": [[["1", "1"], ["0", "1"]]]
}"#;

#[test]
fn lie_queries() {
    let v = json(&cli(&["lie", "betti", "heisenberg:3"]));
    assert_eq!(v["betti"], serde_json::json!([1, 2, 2, 1]));
    let v = json(&cli(&["lie", "curvature", "heisenberg:3"]));
    assert_eq!(v["exact"], "-1/2");
    assert_eq!(cli(&["lie", "betti", "nope"]).status.code(), Some(1));
}

#[test]
fn validate_detects_file_types() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let alg = write(d, "alg.json", r#"{"dim": 3, "brackets": [{"i": 1, "j": 2, "k": 3, "c": "1"}]}"#);
    assert_eq!(json(&cli(&["validate", &alg]))["type"], "algebra");
    let bundle = write(d, "bundle.json", UNIPOTENT);
    assert_eq!(json(&cli(&["validate", &bundle]))["type"], "bundle");
    let complex = write(d, "complex.json", r#"{"dims": [[1, 1]], "maps": []}"#);
    assert_eq!(json(&cli(&["validate", &complex]))["betti"], serde_json::json!([1, 1]));
    let scenario = write(
        d,
        "scenario.json",
        r#"{"name": "s", "kind": "nil_rescale", "model": {"file": "alg.json"},
            "sweep": {"param": "eps", "values": [0.5, 0.25]}, "degrees": [1]}"#,
    );
    assert_eq!(json(&cli(&["validate", &scenario]))["type"], "scenario");

    let bad = write(d, "bad.json", r#"{"dim": 2, "brackets": [{"i": 1, "j": 2, "k": 1, "c": "1"}]}"#);
    assert_eq!(cli(&["validate", &bad]).status.code(), Some(1));
    let garbage = write(d, "garbage.json", "{");
    assert_eq!(cli(&["validate", &garbage]).status.code(), Some(1));
    assert_eq!(cli(&["validate", "/nonexistent.json"]).status.code(), Some(1));
}

#[test]
fn spectrum_and_spectral_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = write(dir.path(), "bundle.json", UNIPOTENT);
    let v = json(&cli(&["spectrum", &bundle, "--p", "1", "--modes", "4"]));
    assert_eq!(v["kernel_count"], 2);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 4);
    let v = json(&cli(&["ss", &bundle]));
    assert_eq!(v["spectral_sequence"]["total_cohomology"], serde_json::json!([1, 2, 2, 1]));
    let predicted: Vec<u64> = v["predictions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["predicted_small_count"].as_u64().unwrap())
        .collect();
    assert_eq!(predicted, [1, 3, 3, 1]);
    assert_eq!(cli(&["spectrum", &bundle, "--p", "9"]).status.code(), Some(1));
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = cli(&["run", "example1_heisenberg_point", "--out", out.to_str().unwrap(), "--check"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for ext in ["json", "csv", "dat"] {
        assert!(out.join(format!("example1_heisenberg_point.{ext}")).exists());
    }
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("pass prediction_consistency p=1")));
}

#[test]
fn failed_check_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // τ = 1 is far from the adiabatic limit, so the third eigenvalue is not yet small.
    let scenario = write(
        dir.path(),
        "s.json",
        r#"{"name": "early", "kind": "circle_bundle_adiabatic",
            "model": {"bundle": {"base": {"kind": "torus2", "resolution": 8, "circumferences": [1, 1]},
                      "algebra": {"preset": "abelian:1"}, "a2": "interior:T", "T": ["1"]}},
            "sweep": {"param": "tau", "values": [1.0]}, "degrees": [1]}"#,
    );
    let out = dir.path().join("out");
    let args = ["run", scenario.as_str(), "--out", out.to_str().unwrap()];
    assert!(cli(&args).status.success());
    let mut checked = args.to_vec();
    checked.push("--check");
    assert_eq!(cli(&checked).status.code(), Some(3));
}
