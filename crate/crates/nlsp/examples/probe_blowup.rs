use nlsp::evolution::{integrate, EvolutionStatus, SolverConfig};
use nlsp::spectral::{Grid, SpectralField};
use std::f64::consts::PI;

fn main() {
    for m in [32usize, 64] {
        let g = Grid::new(2, m).unwrap();
        for a in [6000.0, 10000.0, 15000.0, 20000.0, 40000.0] {
            let u0 = SpectralField::from_fn(g, |x| a * (2.0 * PI * x[0]).sin());
            let e = nlsp::diagnostics::blowup_energy(&u0, 1.5);
            let config = SolverConfig {
                dt: 2e-6,
                t_end: 0.1,
                ..Default::default()
            };
            let start = std::time::Instant::now();
            let (record, status) = integrate(&u0, &config, 1000).unwrap();
            let last = record.last().unwrap();
            println!(
                "M={m} A={a:8.0} E={e:+.3e} -> {:?} last_l2={:.3e} t={:.4} wall={:?}",
                status,
                last.l2_norm,
                last.t,
                start.elapsed()
            );
        }
    }
}
