//! Dissipation time tau*(v): the first time the advection-diffusion
//! solution operator halves every mean-zero datum. Zero flow gives the
//! analytic ln 2 / (nu lambda_1); cellular stirring shortens it.
//!
//! ```text
//! cargo run --release --example dissipation_time
//! ```

use nlsp::dissipation::dissipation_time;
use nlsp::flow::FlowSpec;
use nlsp::spectral::LAMBDA_1;

fn main() -> nlsp::Result<()> {
    let k = 8; // truncation: mean-zero modes with |k|_inf <= K
    let zero = dissipation_time(&FlowSpec::Zero, 1.0, k, 1e-7)?;
    println!(
        "tau*(zero)            = {:.6}  (analytic ln2/lambda_1 = {:.6})",
        zero.tau_star,
        std::f64::consts::LN_2 / LAMBDA_1
    );

    for amplitude in [10.0, 50.0, 200.0] {
        let res = dissipation_time(
            &FlowSpec::Cellular {
                amplitude,
                cell_scale: 1.0,
            },
            1.0,
            k,
            1e-6,
        )?;
        println!("tau*(cellular A={amplitude:>4}) = {:.6}", res.tau_star);
    }
    for cell_scale in [0.5, 0.25] {
        let res = dissipation_time(
            &FlowSpec::Cellular {
                amplitude: 200.0,
                cell_scale,
            },
            1.0,
            k,
            1e-6,
        )?;
        println!(
            "tau*(cellular A= 200, l={cell_scale}) = {:.6}",
            res.tau_star
        );
    }
    Ok(())
}
