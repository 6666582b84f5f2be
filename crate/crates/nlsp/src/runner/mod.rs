//! Scenario runner: configuration, scenario dispatch, persistence and
//! report emission. Every run is reproducible from its config text and
//! seed; reruns produce byte-identical artifacts.

pub mod checkpoint;
pub mod config;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::diagnostics::{self, TrajectoryRecord};
use crate::dissipation::{
    dissipation_time, dissipation_time_unsteady, enhanced_dissipation_fit,
};
use crate::error::{Error, Result};
use crate::evolution::{integrate_with, EquationForm, EvolutionStatus};
use crate::rng::CounterRng;
use crate::spectral::{Grid, SpectralField};

pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
pub use config::{parse_config, InitialData, RunConfig, Scenario};
pub use report::{num, write_decay_svg, write_summary, write_trajectory_csv, Summary};

/// Everything a run leaves behind, plus how the process should exit.
pub struct RunArtifacts {
    pub summary: Summary,
    pub numerical_failure: bool,
}

/// Deterministic random band-limited mean-zero field.
pub fn random_band_field(
    grid: Grid,
    k_max: usize,
    amplitude: f64,
    seed: u64,
) -> Result<SpectralField> {
    let mut rng = CounterRng::new(seed);
    let mut field = SpectralField::zero(grid);
    let k = k_max as i64;
    if grid.dim() == 1 {
        for k1 in 1..=k {
            let c = num_complex::Complex64::new(rng.next_normal(), rng.next_normal())
                / (1.0 + (k1 * k1) as f64);
            field.set_coeff(&[k1], c);
            field.set_coeff(&[-k1], c.conj());
        }
    } else {
        for k1 in -k..=k {
            for k2 in -k..=k {
                let rep = k1 > 0 || (k1 == 0 && k2 > 0);
                if !rep {
                    continue;
                }
                let c = num_complex::Complex64::new(rng.next_normal(), rng.next_normal())
                    / (1.0 + (k1 * k1 + k2 * k2) as f64);
                field.set_coeff(&[k1, k2], c);
                field.set_coeff(&[-k1, -k2], c.conj());
            }
        }
    }
    let norm = field.l2_norm();
    if norm == 0.0 {
        return Err(Error::InvalidParameter(
            "random band produced an empty field (k_max = 0?)".into(),
        ));
    }
    Ok(field.scale(amplitude / norm))
}

/// Materialize the configured initial data on the configured grid.
pub fn build_initial(cfg: &RunConfig) -> Result<SpectralField> {
    match &cfg.initial {
        InitialData::Zero => Ok(SpectralField::zero(cfg.grid)),
        InitialData::SingleMode { k, amplitude } => {
            if k.len() != cfg.grid.dim() {
                return Err(Error::InvalidParameter(format!(
                    "initial mode {k:?} does not match grid dimension {}",
                    cfg.grid.dim()
                )));
            }
            let k = k.clone();
            let amplitude = *amplitude;
            Ok(SpectralField::from_fn(cfg.grid, move |x| {
                let phase: f64 = k
                    .iter()
                    .zip(x)
                    .map(|(&kj, &xj)| kj as f64 * xj)
                    .sum();
                amplitude * (2.0 * std::f64::consts::PI * phase).sin()
            }))
        }
        InitialData::RandomBand {
            k_max,
            amplitude,
            seed,
        } => random_band_field(cfg.grid, *k_max, *amplitude, seed ^ cfg.seed),
        InitialData::File { path } => {
            let (field, _) = load_checkpoint(path)?;
            if field.grid() != cfg.grid {
                return Err(Error::InvalidParameter(format!(
                    "checkpoint grid {:?} does not match configured grid {:?}",
                    field.grid(),
                    cfg.grid
                )));
            }
            Ok(field)
        }
    }
}

fn status_label(status: &EvolutionStatus) -> String {
    match status {
        EvolutionStatus::Completed => "completed".into(),
        EvolutionStatus::BlowUp { .. } => "blow-up".into(),
        EvolutionStatus::StepCollapse { .. } => "step-collapse".into(),
    }
}

fn base_summary(cfg: &RunConfig) -> Summary {
    let mut s = Summary::new();
    s.insert("scenario".into(), cfg.scenario.as_str().into());
    s.insert("seed".into(), cfg.seed.into());
    s.insert(
        "config_hash".into(),
        format!("{:016x}", crate::evolution::fnv1a(cfg.raw.as_bytes())).into(),
    );
    s
}

/// Run a single trajectory with checkpointing, returning the record,
/// status and final state.
fn run_trajectory(
    cfg: &RunConfig,
    u0: &SpectralField,
    t0: f64,
    out_dir: &Path,
) -> Result<(TrajectoryRecord, EvolutionStatus, SpectralField)> {
    let mut last = u0.clone();
    let every = cfg.checkpoint_every;
    let meta = |t: f64| CheckpointMeta {
        nu: cfg.solver.nu,
        p: cfg.solver.p,
        t,
    };
    let (record, status) = integrate_with(u0, t0, &cfg.solver, cfg.sample_every, |step, t, u| {
        last = u.clone();
        if every > 0 && step % every as u64 == 0 {
            let path = out_dir.join(format!("checkpoint_{step:08}.nlsp"));
            save_checkpoint(u, meta(t), &path)?;
        }
        Ok(())
    })?;
    let final_t = record.last().map(|s| s.t).unwrap_or(t0);
    save_checkpoint(&last, meta(final_t), &out_dir.join("final.nlsp"))?;
    Ok((record, status, last))
}

fn run_simulate(cfg: &RunConfig, out_dir: &Path) -> Result<RunArtifacts> {
    let u0 = build_initial(cfg)?;
    let (record, status, _) = run_trajectory(cfg, &u0, 0.0, out_dir)?;
    write_trajectory_csv(&record, &out_dir.join("trajectory.csv"))?;
    let decay: Vec<(f64, f64)> = record.samples.iter().map(|s| (s.t, s.l2_norm)).collect();
    let _ = write_decay_svg(&decay, "L2 norm (log scale)", &out_dir.join("decay.svg"))?;

    let mut summary = base_summary(cfg);
    summary.insert("status".into(), status_label(&status).into());
    if let EvolutionStatus::BlowUp { t_detect, norm } = &status {
        summary.insert("blowup_t_detect".into(), num(*t_detect));
        summary.insert("blowup_norm".into(), num(*norm));
    }
    if let Some(lastrow) = record.last() {
        summary.insert("t_final".into(), num(lastrow.t));
        summary.insert("l2_final".into(), num(lastrow.l2_norm));
        summary.insert("energy_residual_final".into(), num(lastrow.energy_residual));
    }
    summary.insert("l2_initial".into(), num(u0.l2_norm()));
    summary.insert(
        "blowup_energy_initial".into(),
        num(diagnostics::blowup_energy(&u0, cfg.solver.p)),
    );
    write_summary(&summary, &out_dir.join("summary.json"))?;
    Ok(RunArtifacts {
        summary,
        numerical_failure: matches!(status, EvolutionStatus::StepCollapse { .. }),
    })
}

fn run_dissipation_time(cfg: &RunConfig, out_dir: &Path) -> Result<RunArtifacts> {
    let d = &cfg.dissipation;
    let result = if cfg.solver.flow.is_time_dependent() {
        dissipation_time_unsteady(
            &cfg.solver.flow,
            cfg.solver.nu,
            d.truncation,
            d.tolerance,
            &d.start_times,
            d.stepping_dt,
        )?
    } else {
        dissipation_time(&cfg.solver.flow, cfg.solver.nu, d.truncation, d.tolerance)?
    };

    // norm curve as CSV for plotting
    let mut curve = String::from("t,operator_norm\n");
    for (t, n) in &result.norm_curve {
        curve.push_str(&format!("{t:.16e},{n:.16e}\n"));
    }
    fs::write(out_dir.join("norm_curve.csv"), curve)?;
    let _ = write_decay_svg(
        &result.norm_curve,
        "solution operator norm",
        &out_dir.join("decay.svg"),
    )?;

    let mut summary = base_summary(cfg);
    summary.insert("tau_star".into(), num(result.tau_star));
    summary.insert("truncation".into(), (result.truncation as u64).into());
    summary.insert("bisection_tol".into(), num(result.bisection_tol));
    summary.insert("nu".into(), num(cfg.solver.nu));
    write_summary(&summary, &out_dir.join("summary.json"))?;
    Ok(RunArtifacts {
        summary,
        numerical_failure: false,
    })
}

fn run_blowup_scan(cfg: &RunConfig, out_dir: &Path) -> Result<RunArtifacts> {
    let base_amplitude = match &cfg.initial {
        InitialData::SingleMode { amplitude, .. } => *amplitude,
        _ => 1.0,
    };
    let rows: Vec<Summary> = cfg
        .scan
        .amplitudes
        .iter()
        .enumerate()
        .map(|(i, &a)| -> Result<Summary> {
            let mut row_cfg = cfg.clone();
            row_cfg.initial = match &cfg.initial {
                InitialData::SingleMode { k, .. } => InitialData::SingleMode {
                    k: k.clone(),
                    amplitude: a,
                },
                other => other.clone(),
            };
            let u0 = build_initial(&row_cfg)?;
            let energy = diagnostics::blowup_energy(&u0, cfg.solver.p);
            let row_dir = out_dir.join(format!("row_{i:04}"));
            fs::create_dir_all(&row_dir)?;
            let (record, status, _) = run_trajectory(&row_cfg, &u0, 0.0, &row_dir)?;
            write_trajectory_csv(&record, &row_dir.join("trajectory.csv"))?;
            let mut row = Summary::new();
            row.insert("amplitude".into(), num(a));
            row.insert("blowup_energy".into(), num(energy));
            row.insert("status".into(), status_label(&status).into());
            if let EvolutionStatus::BlowUp { t_detect, norm } = &status {
                row.insert("t_detect".into(), num(*t_detect));
                row.insert("final_norm".into(), num(*norm));
            } else if let Some(s) = record.last() {
                row.insert("final_norm".into(), num(s.l2_norm));
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut csv = String::from("amplitude,blowup_energy,status,final_norm\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            row["amplitude"],
            row["blowup_energy"],
            row["status"].as_str().unwrap_or("?"),
            row.get("final_norm").cloned().unwrap_or_else(|| num(f64::NAN)),
        ));
    }
    fs::write(out_dir.join("scan.csv"), csv)?;

    let mut summary = base_summary(cfg);
    summary.insert(
        "rows".into(),
        serde_json::Value::Array(
            rows.iter()
                .map(|r| serde_json::Value::Object(r.clone().into_iter().collect()))
                .collect(),
        ),
    );
    summary.insert("base_amplitude".into(), num(base_amplitude));
    write_summary(&summary, &out_dir.join("summary.json"))?;
    Ok(RunArtifacts {
        summary,
        numerical_failure: false,
    })
}

fn run_enhanced_sweep(cfg: &RunConfig, out_dir: &Path) -> Result<RunArtifacts> {
    let fit = enhanced_dissipation_fit(
        &cfg.solver.flow,
        &cfg.enhanced.nu_values,
        cfg.enhanced.truncation,
        cfg.seed,
    )?;
    let mut csv = String::from("nu,lambda,fit_r_squared\n");
    for p in &fit.per_nu {
        csv.push_str(&format!(
            "{:.16e},{:.16e},{:.16e}\n",
            p.nu, p.lambda, p.fit_r_squared
        ));
    }
    fs::write(out_dir.join("rates.csv"), csv)?;

    let mut summary = base_summary(cfg);
    summary.insert("exponent".into(), num(fit.exponent));
    summary.insert("log_prefactor".into(), num(fit.log_prefactor));
    summary.insert("r_squared".into(), num(fit.r_squared));
    summary.insert(
        "truncation".into(),
        (cfg.enhanced.truncation as u64).into(),
    );
    write_summary(&summary, &out_dir.join("summary.json"))?;
    Ok(RunArtifacts {
        summary,
        numerical_failure: false,
    })
}

fn run_shear_suppression(cfg: &RunConfig, out_dir: &Path) -> Result<RunArtifacts> {
    if cfg.solver.form != EquationForm::RescaledShear {
        return Err(Error::InvalidParameter(
            "shear-suppression runs the rescaled form; set form = \"rescaled-shear\"".into(),
        ));
    }
    let p = cfg.solver.p;
    let nu = cfg.solver.nu;
    let sup = &cfg.suppression;

    // empirical constants of the averaged-mode argument
    let c_p = diagnostics::fit_cp(p, sup.cp_samples, cfg.seed)?;
    let threshold = diagnostics::smallness_threshold(p, c_p)?;
    let mean_bound = 4.0 * threshold; // the in-time bound is 2x the half-threshold form

    // enhanced-dissipation rate at the configured viscosity
    let fit = enhanced_dissipation_fit(
        &cfg.solver.flow,
        &cfg.enhanced.nu_values,
        sup.fit_truncation,
        cfg.seed,
    )?;
    let lambda_nu = fit.rate_at(nu);

    // initial data: averaged mode at the requested fraction of the
    // threshold plus a generic non-sheared part
    let mean_amp = sup.threshold_fraction * threshold;
    let perp_amp = sup.perp_amplitude;
    let raw_perp = SpectralField::from_fn(cfg.grid, |x| {
        let two_pi = 2.0 * std::f64::consts::PI;
        (two_pi * x[0]).sin() + 0.7 * (two_pi * (x[0] + x[1])).cos()
    });
    let perp_norm = raw_perp.l2_norm();
    let u0 = SpectralField::from_fn(cfg.grid, |x| {
        let two_pi = 2.0 * std::f64::consts::PI;
        mean_amp * 2.0_f64.sqrt() * (two_pi * x[1]).sin()
    })
    .lin_comb(1.0, &raw_perp, perp_amp / perp_norm)?;

    let mut run_cfg = cfg.clone();
    run_cfg.solver.t_end = sup.horizon_rate_multiples / lambda_nu;
    let (record, status, _) = run_trajectory(&run_cfg, &u0, 0.0, out_dir)?;
    write_trajectory_csv(&record, &out_dir.join("trajectory.csv"))?;
    let perp_series: Vec<(f64, f64)> =
        record.samples.iter().map(|s| (s.t, s.l2_perp)).collect();
    let _ = write_decay_svg(
        &perp_series,
        "non-sheared component (log scale)",
        &out_dir.join("decay.svg"),
    )?;

    let monitor = diagnostics::bootstrap_monitor(&record, lambda_nu, nu)?;
    let max_mean = record
        .samples
        .iter()
        .map(|s| s.l2_mean_x1)
        .fold(0.0, f64::max);

    let mut summary = base_summary(cfg);
    summary.insert("status".into(), status_label(&status).into());
    summary.insert("c_p".into(), num(c_p));
    summary.insert("smallness_threshold".into(), num(threshold));
    summary.insert("mean_initial_norm".into(), num(mean_amp));
    summary.insert("lambda_nu".into(), num(lambda_nu));
    summary.insert("ed_exponent".into(), num(fit.exponent));
    summary.insert("ed_r_squared".into(), num(fit.r_squared));
    summary.insert("coeff_decay".into(), num(monitor.coeff_decay));
    summary.insert("coeff_gradient".into(), num(monitor.coeff_gradient));
    summary.insert("mean_norm_max".into(), num(max_mean));
    summary.insert("mean_norm_bound".into(), num(mean_bound));
    summary.insert("t_end".into(), num(run_cfg.solver.t_end));
    summary.insert(
        "bootstrap_ok".into(),
        (monitor.coeff_decay <= 20.0 && monitor.coeff_gradient <= 10.0).into(),
    );
    summary.insert("mean_bound_ok".into(), (max_mean <= mean_bound).into());
    write_summary(&summary, &out_dir.join("summary.json"))?;
    Ok(RunArtifacts {
        summary,
        numerical_failure: matches!(status, EvolutionStatus::StepCollapse { .. }),
    })
}

/// Execute a configuration; artifacts land in its output directory.
pub fn run(cfg: &RunConfig) -> Result<RunArtifacts> {
    fs::create_dir_all(&cfg.output_dir)?;
    let out = cfg.output_dir.clone();
    match cfg.scenario {
        Scenario::Simulate => run_simulate(cfg, &out),
        Scenario::DissipationTime => run_dissipation_time(cfg, &out),
        Scenario::BlowupScan => run_blowup_scan(cfg, &out),
        Scenario::EnhancedDissipationSweep => run_enhanced_sweep(cfg, &out),
        Scenario::ShearSuppression => run_shear_suppression(cfg, &out),
    }
}

/// Resume a simulate run from a checkpoint; integrates to the configured
/// `t_end` and writes the usual artifacts (the trajectory and the energy
/// accounting restart at the checkpoint time).
pub fn resume(cfg: &RunConfig, checkpoint: &Path) -> Result<RunArtifacts> {
    fs::create_dir_all(&cfg.output_dir)?;
    let (u, meta) = load_checkpoint(checkpoint)?;
    if u.grid() != cfg.grid {
        return Err(Error::InvalidParameter(format!(
            "checkpoint grid {:?} does not match configured grid {:?}",
            u.grid(),
            cfg.grid
        )));
    }
    let (record, status, _) = run_trajectory(cfg, &u, meta.t, &cfg.output_dir)?;
    write_trajectory_csv(&record, &cfg.output_dir.join("trajectory.csv"))?;
    let mut summary = base_summary(cfg);
    summary.insert("status".into(), status_label(&status).into());
    summary.insert("resumed_from_t".into(), num(meta.t));
    if let Some(last) = record.last() {
        summary.insert("t_final".into(), num(last.t));
        summary.insert("l2_final".into(), num(last.l2_norm));
    }
    write_summary(&summary, &cfg.output_dir.join("summary.json"))?;
    Ok(RunArtifacts {
        summary,
        numerical_failure: matches!(status, EvolutionStatus::StepCollapse { .. }),
    })
}

/// One row of a sweep table.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub index: usize,
    pub scenario: String,
    pub status: String,
    pub metric: Option<f64>,
    pub error: Option<String>,
}

/// Run configurations concurrently (up to `parallelism` at once) and
/// aggregate one row per config in input order; per-row failures are
/// recorded and do not abort the sweep.
pub fn sweep(configs: &[RunConfig], parallelism: usize, out_dir: &Path) -> Result<Vec<SweepRow>> {
    fs::create_dir_all(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        configs
            .par_iter()
            .enumerate()
            .map(|(i, cfg)| {
                let mut row_cfg = cfg.clone();
                row_cfg.output_dir = out_dir.join(format!("row_{i:04}"));
                match run(&row_cfg) {
                    Ok(artifacts) => {
                        let status = artifacts
                            .summary
                            .get("status")
                            .and_then(|v| v.as_str())
                            .unwrap_or("ok")
                            .to_string();
                        let metric = ["tau_star", "exponent", "l2_final", "lambda_nu"]
                            .iter()
                            .find_map(|k| artifacts.summary.get(*k).and_then(|v| v.as_f64()));
                        SweepRow {
                            index: i,
                            scenario: row_cfg.scenario.as_str().into(),
                            status,
                            metric,
                            error: None,
                        }
                    }
                    Err(e) => SweepRow {
                        index: i,
                        scenario: row_cfg.scenario.as_str().into(),
                        status: "error".into(),
                        metric: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });

    let mut csv = String::from("index,scenario,status,metric,error\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.index,
            row.scenario,
            row.status,
            row.metric.map(|m| format!("{m:.16e}")).unwrap_or_default(),
            row.error.clone().unwrap_or_default().replace(',', ";").replace('\n', " "),
        ));
    }
    fs::write(out_dir.join("sweep.csv"), csv)?;
    Ok(rows)
}

/// Convenience used by the CLI and tests: parse a config file with
/// optional overrides.
pub fn load_config_file(
    path: &Path,
    out_override: Option<PathBuf>,
    seed_override: Option<u64>,
) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    let mut cfg = parse_config(&text)?;
    if let Some(out) = out_override {
        cfg.output_dir = out;
    }
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    Ok(cfg)
}
