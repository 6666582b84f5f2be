use nlsp::dissipation::{
    build_operator, dissipation_time, enhanced_dissipation_fit, solution_operator_norm,
};
use nlsp::flow::FlowSpec;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    // criterion 7 shape: zero flow analytic + cellular amplitude sweep at K=16
    let zero = dissipation_time(&FlowSpec::Zero, 1.0, 16, 1e-6).unwrap();
    println!(
        "tau*(zero) = {:.6} (analytic {:.6}) [{:?}]",
        zero.tau_star,
        std::f64::consts::LN_2 / (4.0 * std::f64::consts::PI.powi(2)),
        t0.elapsed()
    );
    for a in [0.0, 10.0, 50.0, 200.0] {
        let t = Instant::now();
        let flow = FlowSpec::Cellular {
            amplitude: a,
            cell_scale: 1.0,
        };
        let res = dissipation_time(&flow, 1.0, 16, 1e-6).unwrap();
        println!("tau*(cellular A={a:5.0}, l=1, K=16) = {:.6} [{:?}]", res.tau_star, t.elapsed());
    }
    // smaller cells
    for (a, l) in [(200.0, 0.5), (200.0, 0.25), (800.0, 0.25)] {
        let t = Instant::now();
        let flow = FlowSpec::Cellular {
            amplitude: a,
            cell_scale: l,
        };
        let res = dissipation_time(&flow, 1.0, 16, 1e-6).unwrap();
        println!("tau*(cellular A={a:5.0}, l={l}) = {:.6} [{:?}]", res.tau_star, t.elapsed());
    }

    // criterion 8 shape: exponent fit at K=16
    let t = Instant::now();
    let fit = enhanced_dissipation_fit(
        &FlowSpec::shear_sin(1.0),
        &[0.05, 0.02, 0.01, 0.005, 0.002],
        16,
        42,
    )
    .unwrap();
    println!(
        "enhanced: slope={:.4} log_c0={:.4} r2={:.5} [{:?}]",
        fit.exponent,
        fit.log_prefactor,
        fit.r_squared,
        t.elapsed()
    );
    for p in &fit.per_nu {
        println!("  nu={:.4} lambda={:.5} r2={:.5}", p.nu, p.lambda, p.fit_r_squared);
    }

    // K=32 endpoint cost estimate
    let t = Instant::now();
    let op = build_operator(
        &FlowSpec::Cellular {
            amplitude: 50.0,
            cell_scale: 1.0,
        },
        1.0,
        32,
    )
    .unwrap();
    println!("built K=32 operator (n={}) [{:?}]", op.basis_dim(), t.elapsed());
    let t = Instant::now();
    let norm = solution_operator_norm(&op, 0.012).unwrap();
    println!("K=32 norm at t=0.012: {:.6} [{:?}]", norm, t.elapsed());
    println!("total {:?}", t0.elapsed());
}
