//! End-to-end checks of the command-line interface.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bayesmask"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn csv_lines(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn gen_writes_dataset_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("toy.csv");
    run_ok(&[
        "gen", "--kind", "toy", "--seed", "5", "--pairs", "6", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(csv_lines(&out), 1 + 12);
    let manifest = dir.path().join("toy.manifest.json");
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(manifest).unwrap()).unwrap();
    assert_eq!(parsed["n"], 12);
    assert_eq!(parsed["true_irrelevant"], serde_json::json!([0]));

    let uni = dir.path().join("uniform.csv");
    run_ok(&[
        "gen", "--kind", "uniform", "--k", "6", "--multiplier", "5", "--seed", "1", "--out",
        uni.to_str().unwrap(),
    ]);
    assert_eq!(csv_lines(&uni), 1 + 30);
}

#[test]
fn fit_masking_writes_json_and_history() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    run_ok(&["gen", "--kind", "toy", "--seed", "9", "--pairs", "20", "--out", data.to_str().unwrap()]);

    let out = dir.path().join("fit.json");
    run_ok(&[
        "fit", "--data", data.to_str().unwrap(), "--method", "bm-em", "--out",
        out.to_str().unwrap(),
    ]);
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(parsed["method"], "bm-em");
    assert_eq!(parsed["beta_hat"].as_array().unwrap().len(), 2);
    assert!(parsed["iterations"].as_u64().unwrap() >= 1);
    let history = dir.path().join("fit.history.csv");
    assert!(csv_lines(&history) >= 2);
    let header = std::fs::read_to_string(&history).unwrap();
    assert!(header.starts_with("iteration,objective,elapsed_seconds,active_count,beta_0"));
}

#[test]
fn fit_baselines_write_json() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    run_ok(&["gen", "--kind", "toy", "--seed", "2", "--pairs", "15", "--out", data.to_str().unwrap()]);

    for (method, has_alpha, has_gamma) in
        [("lasso", true, false), ("ard", false, true), ("ls", false, false)]
    {
        let out = dir.path().join(format!("{method}.json"));
        run_ok(&[
            "fit", "--data", data.to_str().unwrap(), "--method", method, "--lambda", "200",
            "--folds", "2", "--out", out.to_str().unwrap(),
        ]);
        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(parsed["method"], method);
        assert_eq!(parsed["alpha"].is_null(), !has_alpha, "{method}");
        assert_eq!(parsed["gamma_hat"].is_null(), !has_gamma, "{method}");
    }
}

#[test]
fn compare_runs_a_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = serde_json::json!({
        "kind": "toy_k2",
        "k": 2,
        "trials": 3,
        "seed": 11,
        "noise_variance": 0.005,
        "sample_multiplier": 10,
        "solver": { "max_iterations": 300 },
        "baseline": { "folds": 2 }
    });
    let spec_path = dir.path().join("spec.json");
    std::fs::write(&spec_path, spec.to_string()).unwrap();
    let out_dir = dir.path().join("out");
    run_ok(&[
        "compare", "--spec", spec_path.to_str().unwrap(), "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(csv_lines(&out_dir.join("trials.csv")), 1 + 9);
    assert_eq!(csv_lines(&out_dir.join("aggregate.csv")), 1 + 3);
    assert!(out_dir.join("manifest.json").exists());
}

#[test]
fn trajectory_and_race_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let tdir = dir.path().join("traj");
    run_ok(&[
        "trajectory", "--seed", "3", "--samples", "40", "--budget", "50", "--point", "0.1:0.3",
        "--out", tdir.to_str().unwrap(),
    ]);
    for file in ["trajectory_em.csv", "trajectory_eg.csv", "trajectory_eg_no_reparam.csv", "trajectory_summary.csv", "manifest.json"] {
        assert!(tdir.join(file).exists(), "{file} missing");
    }
    assert_eq!(csv_lines(&tdir.join("trajectory_summary.csv")), 1 + 3);

    let rdir = dir.path().join("race");
    run_ok(&[
        "race", "--k", "6", "--switch-t", "20", "--seed", "4", "--out", rdir.to_str().unwrap(),
    ]);
    for file in ["race_em.csv", "race_hybrid.csv", "race_summary.csv", "manifest.json"] {
        assert!(rdir.join(file).exists(), "{file} missing");
    }
}

#[test]
fn failures_emit_machine_readable_json() {
    let out = bin()
        .args(["fit", "--data", "/nonexistent/nowhere.csv", "--method", "ls", "--out", "/tmp/x.json"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let parsed: serde_json::Value =
        serde_json::from_str(stderr.lines().last().unwrap()).expect("stderr is JSON");
    assert_eq!(parsed["kind"], "io");

    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["gen", "--kind", "toy", "--k", "3", "--out", dir.path().join("x.csv").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let parsed: serde_json::Value = serde_json::from_str(stderr.lines().last().unwrap()).unwrap();
    assert_eq!(parsed["kind"], "invalid_input");
}
