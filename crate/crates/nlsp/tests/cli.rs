//! End-to-end CLI behavior: subcommands, exit codes and artifact layout.

use std::process::Command;

fn nlsp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nlsp"))
}

fn write_config(dir: &std::path::Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn config_violations_exit_2_and_name_the_problems() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.toml",
        "scenario = \"simulate\"\nmystery = 1\n[solver]\np = 2.5\n",
    );
    let out = nlsp().args(["simulate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("mystery"), "stderr: {stderr}");
    assert!(stderr.contains("1 + 2/N"), "stderr: {stderr}");
}

#[test]
fn scenario_subcommand_mismatch_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.toml", "scenario = \"simulate\"\n");
    let out = nlsp()
        .args(["dissipation-time", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_runs_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("artifacts");
    let cfg = write_config(
        dir.path(),
        "run.toml",
        r#"
scenario = "simulate"
sample_every = 2
[solver]
dt = 1e-3
t_end = 0.02
grid_points = 16
[initial]
preset = "single_mode"
k = [1, 0]
amplitude = 0.2
"#,
    );
    let out = nlsp()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("trajectory.csv").exists());
    assert!(out_dir.join("summary.json").exists());
    assert!(out_dir.join("decay.svg").exists());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["status"], "completed");
}

#[test]
fn blow_up_is_a_result_not_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("blowup");
    let cfg = write_config(
        dir.path(),
        "blow.toml",
        r#"
scenario = "simulate"
sample_every = 500
[solver]
dt = 5e-6
t_end = 3.0
grid_points = 32
[initial]
preset = "single_mode"
k = [1, 0]
amplitude = 40000.0
"#,
    );
    let out = nlsp()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["status"], "blow-up");
    assert!(summary["blowup_t_detect"].as_f64().unwrap() < 5.0);
}

#[test]
fn resume_subcommand_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let cfg1 = write_config(
        dir.path(),
        "part.toml",
        r#"
scenario = "simulate"
[solver]
dt = 1e-3
t_end = 0.02
grid_points = 16
[initial]
preset = "single_mode"
k = [1, 0]
amplitude = 0.2
"#,
    );
    let cfg2 = write_config(
        dir.path(),
        "full.toml",
        r#"
scenario = "simulate"
[solver]
dt = 1e-3
t_end = 0.04
grid_points = 16
[initial]
preset = "single_mode"
k = [1, 0]
amplitude = 0.2
"#,
    );
    let out = nlsp()
        .args(["simulate", "--config"])
        .arg(&cfg1)
        .arg("--out")
        .arg(&first)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = nlsp()
        .args(["resume", "--config"])
        .arg(&cfg2)
        .arg("--out")
        .arg(&second)
        .arg("--checkpoint")
        .arg(first.join("final.nlsp"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(second.join("summary.json")).unwrap())
            .unwrap();
    assert!((summary["t_final"].as_f64().unwrap() - 0.04).abs() < 1e-9);
}

#[test]
fn resume_with_corrupt_checkpoint_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.toml", "scenario = \"simulate\"\n");
    let bad = dir.path().join("bad.nlsp");
    std::fs::write(&bad, b"not a checkpoint").unwrap();
    let out = nlsp()
        .args(["resume", "--config"])
        .arg(&cfg)
        .arg("--checkpoint")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_subcommand_aggregates_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sweep");
    let body = r#"
scenario = "simulate"
[solver]
dt = 1e-3
t_end = 0.01
grid_points = 16
"#;
    let cfg = write_config(dir.path(), "row.toml", body);
    let out = nlsp()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--row")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .args(["--threads", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 3); // header + 2 rows
    assert!(out_dir.join("row_0000/summary.json").exists());
    assert!(out_dir.join("row_0001/summary.json").exists());
}
