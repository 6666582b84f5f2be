use nlsp::diagnostics::{bootstrap_monitor, fit_cp, smallness_threshold};
use nlsp::dissipation::enhanced_dissipation_fit;
use nlsp::evolution::{integrate, EquationForm, Method, SolverConfig};
use nlsp::flow::FlowSpec;
use nlsp::spectral::{Grid, SpectralField};
use std::f64::consts::PI;
use std::time::Instant;

fn main() {
    let p = 1.5;
    let c_p = fit_cp(p, 200, 7).unwrap();
    let threshold = smallness_threshold(p, c_p).unwrap();
    println!("C_p = {c_p:.4}, threshold = {threshold:.4}");

    let flow = FlowSpec::shear_sin(1.0);
    let t0 = Instant::now();
    let fit = enhanced_dissipation_fit(&flow, &[0.05, 0.02, 0.01, 0.005, 0.002], 16, 42).unwrap();
    println!(
        "enhanced fit: exponent={:.4} log_c0={:.4} c0={:.4} r2={:.5} [{:?}]",
        fit.exponent,
        fit.log_prefactor,
        fit.log_prefactor.exp(),
        fit.r_squared,
        t0.elapsed()
    );

    let g = Grid::new(2, 64).unwrap();
    let mean_amp = 0.1 * threshold;
    let raw_perp = SpectralField::from_fn(g, |x| {
        (2.0 * PI * x[0]).sin() + 0.7 * (2.0 * PI * (x[0] + x[1])).cos()
    });
    let perp_scale = 0.5 / raw_perp.l2_norm();
    let u0 = SpectralField::from_fn(g, |x| mean_amp * 2.0_f64.sqrt() * (2.0 * PI * x[1]).sin())
        .lin_comb(1.0, &raw_perp, perp_scale)
        .unwrap();
    println!("|u0| = {:.4}, mean part = {:.4}", u0.l2_norm(), mean_amp);

    for nu in [0.05, 0.02, 0.01] {
        let lambda = fit.log_prefactor.exp() * nu.powf(fit.exponent);
        let t_end = 50.0 / lambda;
        let dt = 2e-3_f64.min(0.2 * (nu / (4.0 * PI * PI * 441.0)).powf(1.0 / 3.0) * 10.0);
        let config = SolverConfig {
            nu,
            p,
            dt,
            t_end,
            flow: flow.clone(),
            form: EquationForm::RescaledShear,
            method: Method::Etdrk2,
            ..Default::default()
        };
        let t1 = Instant::now();
        let (record, status) = integrate(&u0, &config, 20).unwrap();
        let monitor = bootstrap_monitor(&record, lambda, nu).unwrap();
        let max_mean = record
            .samples
            .iter()
            .map(|s| s.l2_mean_x1)
            .fold(0.0f64, f64::max);
        let last = record.last().unwrap();
        println!(
            "nu={nu:.3} lambda={lambda:.4} t_end={t_end:.1} dt={dt:.2e} -> {status:?} \
             decay_c={:.3} grad_c={:.3} max_mean={:.4} (bound {:.4}) l2_end={:.3e} [{:?}]",
            monitor.coeff_decay,
            monitor.coeff_gradient,
            max_mean,
            4.0 * threshold,
            last.l2_norm,
            t1.elapsed()
        );
    }
}
