//! Free transport by a shear mixes: the H^{-1} norm of the non-sheared
//! part decays polynomially. The fitted log-log slope is reported against
//! both the (1+t)^{-m} and the (1+t)^{-1/m} readings of the mixing rate
//! for a profile with critical-point order m.
//!
//! ```text
//! cargo run --release --example mixing_decay
//! ```

use nlsp::diagnostics::linear_fit;
use nlsp::dissipation::pure_transport_mixing;
use nlsp::flow::ShearProfile;
use nlsp::spectral::{Grid, SpectralField};
use std::f64::consts::PI;

fn main() -> nlsp::Result<()> {
    let grid = Grid::new(2, 512)?;
    let u0 = SpectralField::from_fn(grid, |x| (2.0 * PI * x[0]).sin());
    let m = 2.0; // critical-point order of sin

    let times: Vec<f64> = (0..32)
        .map(|i| 25.0f64.powf(i as f64 / 31.0)) // log-spaced in [1, 25]
        .collect();
    let norms = pure_transport_mixing(&u0, &ShearProfile::Sin { amplitude: 1.0 }, &times)?;

    let xs: Vec<f64> = times.iter().map(|t| (1.0 + t).ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let (slope, _, r2) = linear_fit(&xs, &ys);
    println!("fitted H^-1 slope over t in [1, 25]: {slope:.4} (R^2 = {r2:.5})");
    println!("  against the (1+t)^-m   reading: expected {:.1}", -m);
    println!("  against the (1+t)^-1/m reading: expected {:.1}", -1.0 / m);
    for (t, n) in times.iter().zip(&norms).step_by(6) {
        println!("    t = {t:6.2}: H^-1 = {n:.5e}");
    }
    Ok(())
}
