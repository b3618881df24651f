use std::path::Path;
use std::process::{Command, Output};

use blockbeta_cli::record::{read_csv, RunRecord};

fn blockbeta(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockbeta"))
        .args(args)
        .current_dir(cwd)
        .env_remove("BLOCKBETA_OUT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL: &str = r#"{
    "block_dims": [2, 1],
    "n_grid": [20, 40, 80, 160, 320, 640, 1280],
    "reps_per_n": 3,
    "root_seed": 5,
    "observables": ["f_vector", "volume_deficit"]
}"#;

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn simulate_fit_plot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = blockbeta(&["simulate", "--config", &cfg, "--out", "run"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let rec = RunRecord::load(&dir.path().join("run")).unwrap();
    let (dim, rows) = read_csv(&dir.path().join("run/runs.csv")).unwrap();
    assert_eq!(dim, 3);
    assert_eq!(rows, rec.rows);
    assert_eq!(rows.len(), 21);

    let fit = blockbeta(&["fit", "run", "--out", "fitted"], dir.path());
    assert!(fit.status.success(), "{}", String::from_utf8_lossy(&fit.stderr));
    assert!(stdout(&fit).contains("fitted"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fitted/fit.json")).unwrap()).unwrap();
    assert!(json["exponent_hat"].as_f64().unwrap().is_finite());

    let plot = blockbeta(&["plot", "run", "--out", "fig"], dir.path());
    assert!(plot.status.success());
    let script = std::fs::read_to_string(dir.path().join("fig/plot.gp")).unwrap();
    assert!(script.contains("set logscale xy"));
    assert!(script.contains("curve0_2-1.dat"));
    assert!(dir.path().join("fig/curve0_2-1.dat").exists());
}

#[test]
fn same_seed_same_bytes_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    for (w, o) in [("1", "a"), ("3", "b")] {
        let out = blockbeta(&["simulate", "--config", &cfg, "--workers", w, "--out", o], dir.path());
        assert!(out.status.success());
    }
    let a = std::fs::read(dir.path().join("a/runs.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/runs.csv")).unwrap();
    assert_eq!(a, b);

    let out = blockbeta(&["simulate", "--config", &cfg, "--seed", "6", "--out", "c"], dir.path());
    assert!(out.status.success());
    assert_ne!(a, std::fs::read(dir.path().join("c/runs.csv")).unwrap());
}

#[test]
fn tampered_csv_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    assert!(blockbeta(&["simulate", "--config", &cfg, "--out", "run"], dir.path()).status.success());
    let csv = dir.path().join("run/runs.csv");
    let text = std::fs::read_to_string(&csv).unwrap().replacen("\n20,0,", "\n20,0,1", 1);
    std::fs::write(&csv, text).unwrap();
    let fit = blockbeta(&["fit", "run"], dir.path());
    assert_eq!(fit.status.code(), Some(2));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"block_dims": [2], "reps": 3}"#);
    let out = blockbeta(&["simulate", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reps"));
}

#[test]
fn budget_refusal_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"block_dims": [1, 1], "n_grid": [10, 20], "reps_per_n": 2, "budget": 10}"#);
    let refused = blockbeta(&["simulate", "--config", &cfg, "--out", "x"], dir.path());
    assert_eq!(refused.status.code(), Some(2));
    assert!(!dir.path().join("x").exists());
    let forced = blockbeta(&["simulate", "--config", &cfg, "--out", "x", "--budget-override"], dir.path());
    assert!(forced.status.success());
}

#[test]
fn bad_usage_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(blockbeta(&["simulate"], dir.path()).status.code(), Some(2));
    assert_eq!(blockbeta(&["verify", "nonsense"], dir.path()).status.code(), Some(2));
    assert_eq!(blockbeta(&["predict", "--dims", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(blockbeta(&["fit", "missing"], dir.path()).status.code(), Some(2));
    assert_eq!(blockbeta(&["plot", "missing"], dir.path()).status.code(), Some(2));
    assert_eq!(blockbeta(&["plot"], dir.path()).status.code(), Some(2));
}

#[test]
fn predict_prints_rates() {
    let dir = tempfile::tempdir().unwrap();
    let out = blockbeta(&["predict", "--dims", "4"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("exponent 0.600000"));

    let out = blockbeta(&["predict", "--dims", "2,2"], dir.path());
    assert!(stdout(&out).contains("exponent 0.333333"));
    assert!(stdout(&out).contains("multiplicity 2"));

    let out = blockbeta(&["predict", "--dims", "3", "--betas", "1"], dir.path());
    assert!(stdout(&out).contains("exponent 0.333333"));

    let out = blockbeta(&["predict", "--dims", "1,1,1", "--betas", "0.5,2,0"], dir.path());
    assert!(stdout(&out).contains("exponent 0.000000"));
    assert!(stdout(&out).contains("multiplicity 3"));
}

#[test]
fn quick_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["hull", "bounds", "efron"] {
        let out = blockbeta(&["verify", suite], dir.path());
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", stdout(&out));
        assert!(stdout(&out).contains(&format!("verify {suite}: PASS")));
    }
}
