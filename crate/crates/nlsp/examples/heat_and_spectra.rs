//! Spectral field basics: transforms, the heat semigroup as an exact
//! Fourier multiplier, Sobolev norms and dealiased products.
//!
//! ```text
//! cargo run --release --example heat_and_spectra
//! ```

use nlsp::spectral::{pseudo_product, Grid, SobolevSpec, SpectralField, LAMBDA_1};
use std::f64::consts::PI;

fn main() -> nlsp::Result<()> {
    let grid = Grid::new(2, 64)?;
    let u = SpectralField::from_fn(grid, |x| (2.0 * PI * x[0]).sin());

    println!("u = sin(2 pi x1) on a {0}x{0} grid", grid.points_per_axis());
    println!("  coeff at k = (1,0):   {:+.4e}", u.coeff(&[1, 0]));
    println!("  L2 norm:              {:.12} (exact 1/sqrt(2))", u.l2_norm());
    println!(
        "  H1 seminorm:          {:.12} (exact 2 pi / sqrt(2))",
        u.h1_seminorm()
    );
    println!(
        "  H^-1 norm:            {:.12}",
        u.sobolev_norm(SobolevSpec::homogeneous(-1.0))
    );

    let t = 0.01;
    let heated = u.heat_semigroup(t, 1.0)?;
    println!(
        "\ne^(t Delta) u at t = {t}: amplitude ratio {:.6} (exact e^(-lambda_1 t) = {:.6})",
        heated.l2_norm() / u.l2_norm(),
        (-LAMBDA_1 * t).exp()
    );

    let square = pseudo_product(&u, &u, 2.0 / 3.0)?;
    let exact = SpectralField::from_fn(grid, |x| 0.5 - 0.5 * (4.0 * PI * x[0]).cos());
    println!(
        "\npseudo-spectral sin^2 vs closed form 1/2 - cos(4 pi x1)/2: L2 error {:.3e}",
        square.lin_comb(1.0, &exact, -1.0)?.l2_norm()
    );

    let round_trip = SpectralField::from_samples(grid, &u.to_samples())?;
    println!(
        "transform round-trip error: {:.3e}",
        round_trip.lin_comb(1.0, &u, -1.0)?.l2_norm()
    );
    Ok(())
}
