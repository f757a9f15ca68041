use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qtomo::formats;
use qtomo_core::states::{state_to_density, StateSpec};
use qtomo_core::Complex64;
use tempfile::TempDir;

fn qtomo(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtomo")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited")
}

fn ok(out: Output) -> Output {
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn simulate_writes_requested_rows_deterministically() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(qtomo(&["simulate", "--state", "coherent:2.236", "--seed", "5", "--out", "a"], d));
    ok(qtomo(&["simulate", "--state", "coherent:2.236", "--seed", "5", "--out", "b"], d));
    let a = fs::read(d.join("a/quadratures.csv")).unwrap();
    assert_eq!(a, fs::read(d.join("b/quadratures.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next(), Some("theta,y"));
    assert_eq!(text.lines().count(), 50_001);
    let manifest = json(&d.join("a/simulate.manifest.json"));
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["config"]["state"], "coherent:2.236");
}

#[test]
fn simulated_dfs_follows_first_moment() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(qtomo(&["simulate", "--state", "dfs:2.15+2.1i,1", "--samples", "40000", "--out", "."], d));
    let alpha = Complex64::new(2.15, 2.1);
    let bins = 8;
    let mut acc = vec![(0.0, 0.0, 0.0, 0.0); bins];
    for row in csv_rows(&d.join("quadratures.csv")) {
        let (theta, y) = (row[0], row[1]);
        let b = ((theta / std::f64::consts::TAU) * bins as f64) as usize;
        let want = 2f64.sqrt() * (alpha * Complex64::from_polar(1.0, -theta)).re;
        let e = &mut acc[b.min(bins - 1)];
        e.0 += 1.0;
        e.1 += y;
        e.2 += y * y;
        e.3 += want;
    }
    for (n, s, s2, w) in acc {
        let mean = s / n;
        let se = ((s2 / n - mean * mean) / n).sqrt();
        assert!((mean - w / n).abs() < 4.0 * se, "{mean} vs {}", w / n);
    }
}

#[test]
fn user_errors_exit_one_and_write_nothing() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let out = qtomo(&["simulate", "--state", "squeezed:1", "--out", "o"], d);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("squeezed"));
    assert!(!d.join("o").exists());

    fs::write(d.join("cfg.json"), r#"{"samples": 10, "sampels": 3}"#).unwrap();
    let out = qtomo(&["simulate", "--state", "fock:1", "--config", "cfg.json", "--out", "o"], d);
    assert_eq!(code(&out), 1);
    assert!(!d.join("o").exists());
}

#[test]
fn explicit_flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("cfg.json"), r#"{"state": "fock:1", "samples": 100, "seed": 3}"#).unwrap();
    ok(qtomo(&["simulate", "--config", "cfg.json", "--samples", "40", "--out", "."], d));
    assert_eq!(csv_rows(&d.join("quadratures.csv")).len(), 40);
    let m = json(&d.join("simulate.manifest.json"));
    assert_eq!(m["config"]["samples"], 40);
    assert_eq!(m["config"]["seed"], 3);
}

#[test]
fn ingest_recovers_simulated_quadratures() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(qtomo(&["simulate", "--state", "coherent:2.236", "--samples", "5000", "--traces", "--out", "sim"], d));
    ok(qtomo(
        &["ingest", "--signal", "sim/signal.csv", "--blocked", "sim/blocked.csv", "--phase-file", "sim/quadratures.csv", "--out", "ing"],
        d,
    ));
    let truth = csv_rows(&d.join("sim/quadratures.csv"));
    let got = csv_rows(&d.join("ing/quadratures.csv"));
    assert_eq!(truth.len(), got.len());
    let rms = (truth.iter().zip(&got).map(|(a, b)| (a[1] - b[1]).powi(2)).sum::<f64>() / got.len() as f64).sqrt();
    assert!(rms < 1e-3, "{rms}");
    assert!(truth.iter().zip(&got).all(|(a, b)| a[0] == b[0]));
    let cal = json(&d.join("ing/calibration.json"));
    assert_eq!(cal["n_blocked"], 5000);
    assert!(cal["delta"].as_f64().unwrap() > 0.0);

    // Writing into the directory holding the phase file would overwrite an input.
    let out = qtomo(
        &["ingest", "--signal", "sim/signal.csv", "--blocked", "sim/blocked.csv", "--phase-file", "sim/quadratures.csv", "--out", "sim"],
        d,
    );
    assert_eq!(code(&out), 1);
    assert_eq!(csv_rows(&d.join("sim/quadratures.csv")), truth);
}

#[test]
fn reconstruct_exit_code_tracks_convergence_and_replays() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(qtomo(&["simulate", "--state", "coherent:1.5", "--samples", "20000", "--out", "."], d));
    ok(qtomo(&["reconstruct", "--input", "quadratures.csv", "--dim", "30", "--out", "r1"], d));
    let report = json(&d.join("r1/report.json"));
    assert_eq!(report["converged"], true);
    assert_eq!(report["config"]["dim"], 30);
    assert!(report["iterations"].as_u64().unwrap() > 0);

    ok(qtomo(&["reconstruct", "--config", "r1/reconstruct.manifest.json", "--out", "r2"], d));
    for f in ["rho.json", "report.json"] {
        assert_eq!(fs::read(d.join("r1").join(f)).unwrap(), fs::read(d.join("r2").join(f)).unwrap(), "{f}");
    }

    let out = qtomo(&["reconstruct", "--input", "quadratures.csv", "--dim", "30", "--max-iters", "3", "--out", "r3"], d);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&d.join("r3/report.json"))["converged"], false);
    assert!(d.join("r3/rho.json").exists());
}

#[test]
fn analyze_outputs_for_coherent_and_dfs() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(qtomo(&["simulate", "--state", "coherent:2.23606797749979", "--seed", "2", "--out", "."], d));
    ok(qtomo(&["reconstruct", "--input", "quadratures.csv", "--out", "."], d));
    ok(qtomo(&["analyze", "--rho", "rho.json", "--grid-points", "41", "--out", "an"], d));
    let g2 = json(&d.join("an/g2.json"))["g2"].as_f64().unwrap();
    assert!((g2 - 1.0).abs() < 0.02, "{g2}");
    assert_eq!(json(&d.join("an/fit.json"))["k"], 0);
    assert_eq!(csv_rows(&d.join("an/wigner.csv")).len(), 41 * 41);
    let pn = fs::read_to_string(d.join("an/pn.csv")).unwrap();
    assert_eq!(pn.lines().next(), Some("n,p_reconstructed,p_fit"));
    assert_eq!(pn.lines().count(), 41);
    let wj = json(&d.join("an/wigner.json"));
    assert_eq!(wj["values"].as_array().unwrap().len(), 41);

    let rho = state_to_density(&StateSpec::DisplacedFock { alpha: Complex64::new(1.0, 0.5), k: 1 }, 30).unwrap();
    fs::write(d.join("dfs.json"), formats::density_to_json(&rho)).unwrap();
    ok(qtomo(&["analyze", "--rho", "dfs.json", "--grid-points", "41", "--out", "dfs"], d));
    let wmin = csv_rows(&d.join("dfs/wigner.csv")).iter().map(|r| r[2]).fold(f64::INFINITY, f64::min);
    assert!(wmin < 0.0);
    let neg = json(&d.join("dfs/negativity.json"));
    assert!(neg["versus_fit"]["min_ratio"].as_f64().is_some());
}

#[test]
fn analyze_rejects_bad_density_without_partial_outputs() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("broken.json"), r#"{"dim": 2, "re": [[1, 0], [0"#).unwrap();
    let out = qtomo(&["analyze", "--rho", "broken.json", "--out", "o"], d);
    assert_eq!(code(&out), 1);
    assert!(!d.join("o").exists());

    fs::write(d.join("trace2.json"), r#"{"dim": 2, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]}"#).unwrap();
    let out = qtomo(&["analyze", "--rho", "trace2.json", "--out", "o"], d);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));
    assert!(!d.join("o").exists());
}

#[test]
fn reproduce_is_deterministic_and_reports_checks() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(qtomo(&["reproduce", "coherent5", "--seed", "4", "--out", "a"], d));
    ok(qtomo(&["reproduce", "coherent5", "--seed", "4", "--out", "b"], d));
    assert_eq!(fs::read(d.join("a/summary.json")).unwrap(), fs::read(d.join("b/summary.json")).unwrap());
    let s = json(&d.join("a/summary.json"));
    assert_eq!(s["passed"], true);
    let names: Vec<&str> = s["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"fidelity") && names.contains(&"poisson_tv_distance"));
    for f in ["quadratures.csv", "rho.json", "report.json", "pn.csv", "wigner.csv", "g2.json", "fit.json"] {
        assert!(d.join("a").join(f).exists(), "{f}");
    }

    ok(qtomo(&["reproduce", "dfs9", "--out", "dfs"], d));
    let s = json(&d.join("dfs/summary.json"));
    assert_eq!(s["passed"], true);
    assert_eq!(code(&qtomo(&["reproduce", "nonsense", "--out", "x"], d)), 1);
}
