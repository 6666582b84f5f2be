use nlsp::diagnostics::decay_fit;
use nlsp::evolution::{integrate, EvolutionStatus, Method, SolverConfig};
use nlsp::flow::FlowSpec;
use nlsp::spectral::{Grid, SpectralField};
use std::f64::consts::PI;
use std::time::Instant;

fn stable_dt(flow_amp: f64, m: usize, nu: f64, dealias: f64) -> f64 {
    let v = 2.0 * PI * flow_amp;
    let k_d = dealias * m as f64 / 2.0;
    let bound = (nu / (4.0 * PI * PI * v.powi(4) * k_d * k_d)).powf(1.0 / 3.0);
    0.5 * bound.min(2e-5)
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let a_data: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(20000.0);
    let m = 32usize;
    let g = Grid::new(2, m).unwrap();
    let u0 = SpectralField::from_fn(g, |x| a_data * (2.0 * PI * x[0]).sin());
    println!(
        "A_data={a_data} |u0|={:.4e} E={:.4e}",
        u0.l2_norm(),
        nlsp::diagnostics::blowup_energy(&u0, 1.5)
    );

    // baseline: confirm zero-flow blow-up time
    let base_cfg = SolverConfig {
        dt: 5e-6,
        t_end: 3.0,
        method: Method::Etdrk2,
        ..Default::default()
    };
    let t = Instant::now();
    let (_, status) = integrate(&u0, &base_cfg, 2000).unwrap();
    println!("zero flow -> {status:?} [{:?}]", t.elapsed());

    for (a, l) in [
        (100.0, 1.0),
        (200.0, 1.0),
        (400.0, 1.0),
        (200.0, 0.5),
        (400.0, 0.5),
        (400.0, 0.25),
    ] {
        let dt = stable_dt(a, m, 1.0, 2.0 / 3.0);
        let config = SolverConfig {
            dt,
            t_end: 0.3,
            method: Method::Etdrk2,
            flow: FlowSpec::Cellular {
                amplitude: a,
                cell_scale: l,
            },
            ..Default::default()
        };
        let t = Instant::now();
        let (record, status) = integrate(&u0, &config, 200).unwrap();
        let last = record.last().unwrap();
        let tail: Vec<(f64, f64)> = record
            .samples
            .iter()
            .filter(|s| s.t > 0.1 && s.l2_norm > 0.0)
            .map(|s| (s.t, s.l2_norm))
            .collect();
        let fit = if tail.len() >= 5 {
            decay_fit(&tail).ok()
        } else {
            None
        };
        println!(
            "A={a:5.0} l={l:4.2} dt={dt:.2e} -> {:?} l2(end)={:.3e} fit={:?} [{:?}]",
            match &status {
                EvolutionStatus::Completed => "done".to_string(),
                EvolutionStatus::BlowUp { t_detect, .. } => format!("BLOWUP@{t_detect:.3}"),
                EvolutionStatus::StepCollapse { t } => format!("COLLAPSE@{t:.3}"),
            },
            last.l2_norm,
            fit.map(|f| (f.rate, f.r_squared)),
            t.elapsed()
        );
    }
}
