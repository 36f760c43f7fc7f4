//! End-to-end checks of the `mvsrc` binary surface.

use std::path::Path;
use std::process::{Command, Output};

fn mvsrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvsrc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn synth_dataset(dir: &Path) {
    let out = mvsrc(&[
        "synth",
        "--classes",
        "2",
        "--views",
        "2",
        "--width",
        "8",
        "--height",
        "4",
        "--subspace-dim",
        "2",
        "--train",
        "4",
        "--test",
        "2",
        "--noise-std",
        "0.0",
        "--seed",
        "11",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn synth_writes_manifest_images_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    synth_dataset(dir.path());
    assert!(dir.path().join("manifest.csv").exists());
    assert!(dir.path().join("dataset.json").exists());
    assert!(dir.path().join("images/c1_v1_train_0000.pgm").exists());
    assert!(dir.path().join("images/c2_v2_test_0001.pgm").exists());
    let manifest = std::fs::read_to_string(dir.path().join("manifest.csv")).unwrap();
    assert!(manifest.starts_with("path,class,view,role\n"));
    // 2 classes x 2 views x (4 train + 2 test)
    assert_eq!(manifest.lines().count(), 1 + 24);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("dataset.json")).unwrap())
            .unwrap();
    assert_eq!(meta["generator"], "chacha20/seed64");
}

#[test]
fn rho_kappa_experiment_emits_contract_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("curve.csv");
    let json_path = dir.path().join("curve.json");
    let out = mvsrc(&[
        "experiment",
        "rho-kappa",
        "--num-points",
        "19",
        "--csv",
        csv_path.to_str().unwrap(),
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("kappa,rho\n"));
    assert_eq!(csv.lines().count(), 20);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["experiment_id"], "rho-kappa");
    assert_eq!(report["config"]["num_points"], 19);
}

#[test]
fn views_experiment_on_synthetic_pool() {
    let out = mvsrc(&[
        "experiment",
        "views",
        "--min-views",
        "1",
        "--max-views",
        "2",
        "--train-size",
        "3",
        "--methods",
        "src-multiview",
        "--synth-classes",
        "2",
        "--synth-views",
        "2",
        "--synth-dim",
        "24",
        "--synth-subspace-dim",
        "2",
        "--synth-train",
        "3",
        "--synth-test",
        "3",
        "--synth-noise-std",
        "0.0",
        "--seed",
        "5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("x,src-multiview\n"));
    assert_eq!(stdout.lines().count(), 3);
}

#[test]
fn views_experiment_on_manifest_dataset() {
    let dir = tempfile::tempdir().unwrap();
    synth_dataset(dir.path());
    let manifest = dir.path().join("manifest.csv");
    let json_path = dir.path().join("report.json");
    let out = mvsrc(&[
        "experiment",
        "views",
        "--manifest",
        manifest.to_str().unwrap(),
        "--width",
        "8",
        "--height",
        "4",
        "--min-views",
        "1",
        "--max-views",
        "2",
        "--train-size",
        "3",
        "--methods",
        "jpcem,src-multiview",
        "--seed",
        "9",
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("x,jpcem,src-multiview\n"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 9);
    assert!(report["config"]["dataset"]
        .as_str()
        .unwrap()
        .ends_with("manifest.csv"));
}

#[test]
fn classify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    synth_dataset(dir.path());
    let manifest = dir.path().join("manifest.csv");
    let v1 = dir.path().join("images/c1_v1_test_0000.pgm");
    let v2 = dir.path().join("images/c1_v2_test_0000.pgm");
    let out = mvsrc(&[
        "classify",
        "--manifest",
        manifest.to_str().unwrap(),
        "--width",
        "8",
        "--height",
        "4",
        "--input",
        v1.to_str().unwrap(),
        "--input",
        v2.to_str().unwrap(),
        "--method",
        "jpcem",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let result: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid JSON result");
    assert_eq!(result["method"], "jpcem");
    assert_eq!(result["predicted_class"], 1);
    assert!(result["residuals"].as_array().unwrap().len() == 2);
}

#[test]
fn classify_rejects_view_count_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    synth_dataset(dir.path());
    let manifest = dir.path().join("manifest.csv");
    let v1 = dir.path().join("images/c1_v1_test_0000.pgm");
    let out = mvsrc(&[
        "classify",
        "--manifest",
        manifest.to_str().unwrap(),
        "--width",
        "8",
        "--height",
        "4",
        "--input",
        v1.to_str().unwrap(),
        "--method",
        "jpcem",
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("expects 2"), "stderr: {stderr}");
}

#[test]
fn unknown_method_is_a_usage_error() {
    let out = mvsrc(&[
        "experiment",
        "views",
        "--methods",
        "nonsense",
        "--synth-classes",
        "2",
        "--synth-views",
        "2",
        "--synth-dim",
        "24",
        "--synth-subspace-dim",
        "2",
        "--synth-train",
        "3",
        "--synth-test",
        "2",
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("jpcem"), "stderr lists methods: {stderr}");
    assert!(stderr.lines().count() <= 2, "one-line diagnostic: {stderr}");
}
