//! The built-in divergence-free flows: evaluation, incompressibility
//! checks and shear critical orders.
//!
//! ```text
//! cargo run --release --example flow_gallery
//! ```

use nlsp::flow::{check_incompressible, evaluate_flow, shear_critical_order, FlowSpec};
use nlsp::spectral::Grid;
use std::f64::consts::PI;

fn main() -> nlsp::Result<()> {
    let grid = Grid::new(2, 64)?;
    let flows = vec![
        ("zero", FlowSpec::Zero),
        ("shear sin(2 pi x2)", FlowSpec::shear_sin(1.0)),
        (
            "cellular A=2, l=1/2",
            FlowSpec::Cellular {
                amplitude: 2.0,
                cell_scale: 0.5,
            },
        ),
        (
            "rescaled mixing A=5 over cellular",
            FlowSpec::RescaledMixing {
                base: Box::new(FlowSpec::Cellular {
                    amplitude: 1.0,
                    cell_scale: 1.0,
                }),
                amplitude: 5.0,
            },
        ),
    ];
    println!("{:<36} {:>12} {:>14}", "flow", "max speed", "divergence");
    for (name, spec) in &flows {
        let v = evaluate_flow(spec, grid, 0.0)?;
        let div = check_incompressible(spec, grid)?;
        println!("{:<36} {:>12.4} {:>14.3e}", name, v.max_speed(), div);
    }

    println!("\nshear critical orders (v' and higher derivatives at the critical points):");
    let m = 128;
    let sin_profile: Vec<f64> = (0..m).map(|i| (2.0 * PI * i as f64 / m as f64).sin()).collect();
    let cubed: Vec<f64> = sin_profile.iter().map(|v| v.powi(3)).collect();
    println!("  sin(2 pi x2):    m = {}", shear_critical_order(&sin_profile)?);
    println!("  sin^3(2 pi x2):  m = {}", shear_critical_order(&cubed)?);
    Ok(())
}
