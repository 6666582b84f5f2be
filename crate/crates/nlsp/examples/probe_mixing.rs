use nlsp::diagnostics::linear_fit;
use nlsp::dissipation::pure_transport_mixing;
use nlsp::flow::ShearProfile;
use nlsp::spectral::{Grid, SpectralField};
use std::f64::consts::PI;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let grid = Grid::new(2, 1024).unwrap();
    let u0 = SpectralField::from_fn(grid, |x| (2.0 * PI * x[0]).sin());
    let times: Vec<f64> = (0..40)
        .map(|i| 1.0 * (50.0f64 / 1.0).powf(i as f64 / 39.0))
        .collect();
    let norms =
        pure_transport_mixing(&u0, &ShearProfile::Sin { amplitude: 1.0 }, &times).unwrap();
    let xs: Vec<f64> = times.iter().map(|t| (1.0 + t).ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let (slope, _, r2) = linear_fit(&xs, &ys);
    println!("slope = {slope:.4}, r2 = {r2:.5} [{:?}]", t0.elapsed());
    for (t, n) in times.iter().zip(&norms).step_by(8) {
        println!("  t={t:7.3} H^-1={n:.5e}");
    }
}
