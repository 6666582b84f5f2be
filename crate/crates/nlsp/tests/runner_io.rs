//! Runner-level integration: artifacts, determinism, checkpoint resume and
//! sweep aggregation.

use nlsp::runner::{self, parse_config, RunConfig};

fn config_with(out: &std::path::Path, body: &str) -> RunConfig {
    let text = format!("output_dir = \"{}\"\n{body}", out.display());
    parse_config(&text).expect("valid config")
}

#[test]
fn zero_data_simulate_writes_zero_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_with(
        dir.path(),
        r#"
scenario = "simulate"
[solver]
dt = 1e-3
t_end = 0.02
grid_points = 16
"#,
    );
    let artifacts = runner::run(&cfg).unwrap();
    assert_eq!(artifacts.summary["status"], "completed");
    assert!(!artifacts.numerical_failure);
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,l2_norm,h1_seminorm,l2_mean_x1,l2_perp,blowup_energy,energy_residual"
    );
    for line in lines {
        let l2: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(l2, 0.0);
    }
    assert!(dir.path().join("summary.json").exists());
    assert!(dir.path().join("final.nlsp").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let body = r#"
scenario = "simulate"
seed = 1234
sample_every = 3
[solver]
dt = 5e-4
t_end = 0.05
grid_points = 32
[flow]
variant = "cellular"
amplitude = 1.5
cell_scale = 1.0
[initial]
preset = "random_band"
k_max = 4
amplitude = 0.4
seed = 99
"#;
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    runner::run(&config_with(dir1.path(), body)).unwrap();
    runner::run(&config_with(dir2.path(), body)).unwrap();
    let a = std::fs::read(dir1.path().join("trajectory.csv")).unwrap();
    let b = std::fs::read(dir2.path().join("trajectory.csv")).unwrap();
    assert_eq!(a, b, "trajectory.csv must be byte-identical across reruns");
}

#[test]
fn checkpoint_resume_matches_single_run() {
    let dir_full = tempfile::tempdir().unwrap();
    let dir_part = tempfile::tempdir().unwrap();
    let dir_resume = tempfile::tempdir().unwrap();
    let base = r#"
scenario = "simulate"
[solver]
dt = 1e-3
t_end = %T%
grid_points = 32
[flow]
variant = "shear"
profile = "sin"
amplitude = 1.0
[initial]
preset = "single_mode"
k = [1, 0]
amplitude = 0.3
"#;

    // single run to t2 = 0.06
    let full = config_with(&dir_full.path(), &base.replace("%T%", "0.06"));
    runner::run(&full).unwrap();

    // run to t1 = 0.03, then resume to t2
    let part = config_with(&dir_part.path(), &base.replace("%T%", "0.03"));
    runner::run(&part).unwrap();
    let resume_cfg = config_with(&dir_resume.path(), &base.replace("%T%", "0.06"));
    runner::resume(&resume_cfg, &dir_part.path().join("final.nlsp")).unwrap();

    let (u_full, meta_full) =
        runner::load_checkpoint(&dir_full.path().join("final.nlsp")).unwrap();
    let (u_resumed, meta_resumed) =
        runner::load_checkpoint(&dir_resume.path().join("final.nlsp")).unwrap();
    assert!((meta_full.t - meta_resumed.t).abs() < 1e-12);
    let diff = u_full
        .lin_comb(1.0, &u_resumed, -1.0)
        .unwrap()
        .l2_norm();
    assert!(diff < 1e-12, "resumed state differs by {diff}");
}

#[test]
fn sweep_preserves_order_and_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let body_fast = r#"
scenario = "simulate"
[solver]
dt = 1e-3
t_end = 0.01
grid_points = 16
[initial]
preset = "single_mode"
k = [1, 0]
amplitude = 0.1
"#;
    let cfg = config_with(dir.path(), body_fast);
    let rows = runner::sweep(&[cfg.clone(), cfg.clone(), cfg], 2, dir.path()).unwrap();
    assert_eq!(rows.len(), 3);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.index, i);
        assert_eq!(row.status, "completed");
        assert!(row.error.is_none());
    }
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4); // header + 3 duplicate rows
}

#[test]
fn sweep_of_empty_list_is_empty_success() {
    let dir = tempfile::tempdir().unwrap();
    let rows = runner::sweep(&[], 2, dir.path()).unwrap();
    assert!(rows.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1); // header only
}

#[test]
fn sweep_records_row_failures_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let good = config_with(
        dir.path(),
        r#"
scenario = "simulate"
[solver]
dt = 1e-3
t_end = 0.01
grid_points = 16
"#,
    );
    // a config that parses but fails at run time: initial file is missing
    let bad = config_with(
        dir.path(),
        r#"
scenario = "simulate"
[solver]
dt = 1e-3
t_end = 0.01
grid_points = 16
[initial]
preset = "file"
path = "does-not-exist.nlsp"
"#,
    );
    let rows = runner::sweep(&[good.clone(), bad, good], 2, dir.path()).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0].status, "completed");
    assert_eq!(rows[1].status, "error");
    assert!(rows[1].error.is_some());
    assert_eq!(rows[2].status, "completed");
}

#[test]
fn dissipation_time_scenario_reports_analytic_zero_flow_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_with(
        dir.path(),
        r#"
scenario = "dissipation-time"
[solver]
nu = 1.0
[flow]
variant = "zero"
[dissipation]
truncation = 4
tolerance = 1e-7
"#,
    );
    let artifacts = runner::run(&cfg).unwrap();
    let tau = artifacts.summary["tau_star"].as_f64().unwrap();
    assert!(
        (tau - 0.017558).abs() < 1e-4,
        "tau* = {tau}, expected about 0.017558"
    );
    assert!(dir.path().join("norm_curve.csv").exists());
}

#[test]
fn blowup_scan_rows_carry_energy_and_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_with(
        dir.path(),
        r#"
scenario = "blowup-scan"
[solver]
dt = 1e-3
t_end = 0.02
grid_points = 16
[initial]
preset = "single_mode"
k = [1, 0]
amplitude = 1.0
[scan]
amplitudes = [0.05, 0.1]
"#,
    );
    let artifacts = runner::run(&cfg).unwrap();
    let rows = artifacts.summary["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row["status"], "completed");
        assert!(row["blowup_energy"].as_f64().unwrap() > 0.0);
    }
    let scan = std::fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert_eq!(scan.lines().count(), 3);
}

#[test]
fn random_band_is_deterministic_and_normalized() {
    let grid = nlsp::spectral::Grid::new(2, 32).unwrap();
    let a = runner::random_band_field(grid, 4, 0.7, 5).unwrap();
    let b = runner::random_band_field(grid, 4, 0.7, 5).unwrap();
    assert_eq!(a.coeffs(), b.coeffs());
    assert!((a.l2_norm() - 0.7).abs() < 1e-12);
    assert!(a.is_mean_zero());
    let c = runner::random_band_field(grid, 4, 0.7, 6).unwrap();
    assert_ne!(a.coeffs(), c.coeffs());
}
