//! Dense matrix exponential and operator-norm helpers for the truncated
//! advection-diffusion generators.
//!
//! The exponential uses Taylor scaling-and-squaring with a degree-16
//! Paterson-Stockmeyer evaluation. That choice avoids linear solves, and
//! squaring is benign for this operator family: `-tH` generates an `L^2`
//! contraction at every scale, so intermediate norms never exceed one.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::rng::CounterRng;

/// Taylor degree and its accuracy radius (`theta_16` of the classical
/// truncation analysis: remainder below f64 epsilon for ||A|| <= theta).
const TAYLOR_DEGREE: usize = 16;
const TAYLOR_THETA: f64 = 0.78;
const MAX_SQUARINGS: u32 = 64;

fn one_norm(a: &Array2<f64>) -> f64 {
    let mut worst = 0.0f64;
    for col in a.columns() {
        worst = worst.max(col.iter().map(|v| v.abs()).sum());
    }
    worst
}

/// Degree-16 Taylor polynomial of `exp(a)` by Paterson-Stockmeyer with
/// powers up to `a^4`.
fn taylor_poly(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let mut coeff = [0.0f64; TAYLOR_DEGREE + 1];
    coeff[0] = 1.0;
    for i in 1..=TAYLOR_DEGREE {
        coeff[i] = coeff[i - 1] / i as f64;
    }
    let a2 = a.dot(a);
    let a3 = a2.dot(a);
    let a4 = a3.dot(a);
    let eye = Array2::eye(n);
    // exp(a) ~ sum_{b=0}^{4} (a^4)^b * (c0 I + c1 a + c2 a^2 + c3 a^3)
    let block = |c0: f64, c1: f64, c2: f64, c3: f64| -> Array2<f64> {
        let mut out = &eye * c0;
        out.scaled_add(c1, a);
        out.scaled_add(c2, &a2);
        out.scaled_add(c3, &a3);
        out
    };
    let b0 = block(coeff[0], coeff[1], coeff[2], coeff[3]);
    let b1 = block(coeff[4], coeff[5], coeff[6], coeff[7]);
    let b2 = block(coeff[8], coeff[9], coeff[10], coeff[11]);
    let b3 = block(coeff[12], coeff[13], coeff[14], coeff[15]);
    let b4 = &eye * coeff[16];
    // Horner over the a^4 blocks
    let mut acc = b4;
    for blk in [b3, b2, b1, b0] {
        acc = a4.dot(&acc) + &blk;
    }
    acc
}

/// `exp(a)` by scaling and squaring.
pub fn expm(a: &Array2<f64>) -> Result<Array2<f64>> {
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::Numerical("non-finite matrix in expm".into()));
    }
    let s = if norm > TAYLOR_THETA {
        (norm / TAYLOR_THETA).log2().ceil() as u32
    } else {
        0
    };
    if s > MAX_SQUARINGS {
        return Err(Error::Numerical(format!(
            "expm ill-scaled: ||A||_1 = {norm:.3e} needs {s} squarings (max {MAX_SQUARINGS})"
        )));
    }
    let scaled = a / 2f64.powi(s as i32);
    let mut result = taylor_poly(&scaled);
    for _ in 0..s {
        result = result.dot(&result);
    }
    Ok(result)
}

/// Largest singular value of `s` by block power iteration on `s^T s`.
/// Deterministic start block; relative tolerance on the Rayleigh estimate.
pub struct SingularEstimate {
    pub sigma: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub fn top_singular_value(
    s: &Array2<f64>,
    tol: f64,
    max_iter: usize,
) -> SingularEstimate {
    const BLOCK: usize = 4;
    let n = s.nrows();
    let b = BLOCK.min(n);
    let mut rng = CounterRng::new(0x0f2e_a7ed_5eed);
    let mut v = Array2::<f64>::from_shape_fn((n, b), |_| rng.next_normal());
    orthonormalize(&mut v);
    let mut sigma_sq_prev = 0.0f64;
    for it in 1..=max_iter {
        let w = s.t().dot(&s.dot(&v));
        // Rayleigh estimate from the leading column before re-orthonormalizing
        let sigma_sq = v
            .column(0)
            .iter()
            .zip(w.column(0).iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .abs();
        v = w;
        orthonormalize(&mut v);
        if sigma_sq > 0.0
            && (sigma_sq - sigma_sq_prev).abs() <= tol * sigma_sq
        {
            return SingularEstimate {
                sigma: sigma_sq.sqrt(),
                converged: true,
                iterations: it,
            };
        }
        sigma_sq_prev = sigma_sq;
    }
    SingularEstimate {
        sigma: sigma_sq_prev.sqrt(),
        converged: false,
        iterations: max_iter,
    }
}

/// Modified Gram-Schmidt on the columns.
fn orthonormalize(v: &mut Array2<f64>) {
    let (n, b) = v.dim();
    for j in 0..b {
        for i in 0..j {
            let proj: f64 = (0..n).map(|r| v[[r, i]] * v[[r, j]]).sum();
            for r in 0..n {
                v[[r, j]] -= proj * v[[r, i]];
            }
        }
        let norm: f64 = (0..n).map(|r| v[[r, j]] * v[[r, j]]).sum::<f64>().sqrt();
        if norm > 0.0 {
            for r in 0..n {
                v[[r, j]] /= norm;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_zero_is_identity() {
        let a = Array2::<f64>::zeros((5, 5));
        let e = expm(&a).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((e[[i, j]] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn expm_diagonal() {
        let mut a = Array2::<f64>::zeros((3, 3));
        a[[0, 0]] = -1.0;
        a[[1, 1]] = -10.0;
        a[[2, 2]] = -100.0;
        let e = expm(&a).unwrap();
        for (i, lam) in [-1.0f64, -10.0, -100.0].iter().enumerate() {
            assert!((e[[i, i]] - lam.exp()).abs() < 1e-12 * lam.exp().max(1e-30));
        }
        assert!(e[[0, 1]].abs() < 1e-16);
    }

    #[test]
    fn expm_rotation_block() {
        // exp of a skew block is a rotation
        let w = 3.0;
        let mut a = Array2::<f64>::zeros((2, 2));
        a[[0, 1]] = -w;
        a[[1, 0]] = w;
        let e = expm(&a).unwrap();
        assert!((e[[0, 0]] - w.cos()).abs() < 1e-13);
        assert!((e[[0, 1]] + w.sin()).abs() < 1e-13);
        assert!((e[[1, 0]] - w.sin()).abs() < 1e-13);
    }

    #[test]
    fn expm_semigroup_property() {
        let mut rng = CounterRng::new(4);
        let n = 12;
        let a = Array2::<f64>::from_shape_fn((n, n), |_| 0.3 * rng.next_normal());
        let e1 = expm(&a).unwrap();
        let e2 = expm(&(&a * 2.0)).unwrap();
        let prod = e1.dot(&e1);
        let diff = (&prod - &e2).iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "semigroup violation {diff}");
    }

    #[test]
    fn top_singular_value_of_diagonal() {
        let mut a = Array2::<f64>::zeros((6, 6));
        for i in 0..6 {
            a[[i, i]] = (i as f64 + 1.0) * 0.5;
        }
        let est = top_singular_value(&a, 1e-10, 500);
        assert!(est.converged);
        assert!((est.sigma - 3.0).abs() < 1e-8);
    }

    #[test]
    fn top_singular_value_handles_degenerate_top() {
        let mut a = Array2::<f64>::zeros((4, 4));
        a[[0, 0]] = 2.0;
        a[[1, 1]] = 2.0;
        a[[2, 2]] = 1.0;
        a[[3, 3]] = 0.5;
        let est = top_singular_value(&a, 1e-10, 500);
        assert!((est.sigma - 2.0).abs() < 1e-8);
    }
}
