//! Library of divergence-free velocity fields: the zero flow, horizontal
//! shears `(v1(x2), 0)`, cellular flows, amplitude-rescaled mixing flows
//! `v_A(x, t) = A v(x, A t)`, and custom sampled fields.
//!
//! The cellular flow with amplitude `A` and cell scale `l` (1/l a positive
//! integer) is
//!
//! ```text
//! v_l^A(x, y) = 2 pi A ( -sin(2 pi x / l) cos(2 pi y / l),
//!                         cos(2 pi x / l) sin(2 pi y / l) )
//! ```
//!
//! which is the perpendicular gradient of a product-of-sines stream
//! function, hence exactly divergence-free.

use std::f64::consts::PI;

use ndarray::{ArrayD, Dimension, IxDyn};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SobolevSpec, SpectralField};

/// Shear profile `v1(x2)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ShearProfile {
    /// `amplitude * sin(2 pi x2)`; nondegenerate critical points (order 2).
    Sin { amplitude: f64 },
    /// Arbitrary periodic samples on a uniform grid (power-of-two length).
    Samples(Vec<f64>),
}

impl ShearProfile {
    /// Profile values on a grid of `m` points, resampled trigonometrically
    /// when the native sample count differs.
    pub fn sample(&self, m: usize) -> Result<Vec<f64>> {
        match self {
            ShearProfile::Sin { amplitude } => Ok((0..m)
                .map(|i| amplitude * (2.0 * PI * i as f64 / m as f64).sin())
                .collect()),
            ShearProfile::Samples(values) => {
                if values.len() == m {
                    return Ok(values.clone());
                }
                let native = Grid::new(1, values.len())?;
                let arr = ArrayD::from_shape_vec(IxDyn(&[values.len()]), values.clone())
                    .expect("length matches");
                let field = SpectralField::from_samples(native, &arr)?;
                Ok((0..m)
                    .map(|i| eval_trig_series(&field, 0, i as f64 / m as f64))
                    .collect())
            }
        }
    }
}

/// Tagged description of a divergence-free velocity field.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowSpec {
    Zero,
    Shear {
        profile: ShearProfile,
        /// Declared maximal critical-point order `m` (sin has m = 2).
        critical_order: usize,
    },
    Cellular {
        amplitude: f64,
        /// Cell scale `l`; `1/l` must be a positive integer.
        cell_scale: f64,
    },
    RescaledMixing {
        base: Box<FlowSpec>,
        amplitude: f64,
    },
    Custom {
        grid: Grid,
        components: Vec<ArrayD<f64>>,
    },
}

impl FlowSpec {
    pub fn shear_sin(amplitude: f64) -> Self {
        FlowSpec::Shear {
            profile: ShearProfile::Sin { amplitude },
            critical_order: 2,
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        match self {
            FlowSpec::RescaledMixing { .. } => true,
            _ => false,
        }
    }

    /// Highest spatial frequency present in the flow, used for alias checks.
    pub fn max_frequency(&self, grid: &Grid) -> usize {
        match self {
            FlowSpec::Zero => 0,
            FlowSpec::Shear { .. } => grid.points_per_axis() / 2,
            FlowSpec::Cellular { cell_scale, .. } => (1.0 / cell_scale).round() as usize,
            FlowSpec::RescaledMixing { base, .. } => base.max_frequency(grid),
            FlowSpec::Custom { .. } => grid.points_per_axis() / 2,
        }
    }
}

/// Velocity samples on a grid at one instant.
#[derive(Debug, Clone)]
pub struct VelocitySample {
    pub components: Vec<ArrayD<f64>>,
    pub time: f64,
}

impl VelocitySample {
    /// Pointwise Euclidean magnitude maximum.
    pub fn max_speed(&self) -> f64 {
        let mut worst = 0.0f64;
        let n = self.components[0].len();
        for i in 0..n {
            let mut sq = 0.0;
            for c in &self.components {
                let v = c.as_slice().expect("standard layout")[i];
                sq += v * v;
            }
            worst = worst.max(sq.sqrt());
        }
        worst
    }

    /// `L^q` norm of the pointwise magnitude; `q = f64::INFINITY` gives the
    /// sup norm.
    pub fn lq_norm(&self, q: f64) -> f64 {
        if q.is_infinite() {
            return self.max_speed();
        }
        let n = self.components[0].len() as f64;
        let mut acc = 0.0;
        for i in 0..self.components[0].len() {
            let mut sq = 0.0;
            for c in &self.components {
                let v = c.as_slice().expect("standard layout")[i];
                sq += v * v;
            }
            acc += sq.sqrt().powf(q);
        }
        (acc / n).powf(1.0 / q)
    }
}

/// Evaluate a flow on a grid at time `t`.
pub fn evaluate_flow(spec: &FlowSpec, grid: Grid, t: f64) -> Result<VelocitySample> {
    match spec {
        FlowSpec::Zero => Ok(VelocitySample {
            components: (0..grid.dim())
                .map(|_| ArrayD::zeros(IxDyn(&grid.shape())))
                .collect(),
            time: t,
        }),
        FlowSpec::Shear {
            profile, ..
        } => {
            if grid.dim() != 2 {
                return Err(Error::InvalidParameter(
                    "shear flow requires a 2-dimensional grid".into(),
                ));
            }
            let m = grid.points_per_axis();
            let values = profile.sample(m)?;
            let mut v1 = ArrayD::zeros(IxDyn(&grid.shape()));
            for (idx, out) in v1.indexed_iter_mut() {
                *out = values[idx.slice()[1]];
            }
            Ok(VelocitySample {
                components: vec![v1, ArrayD::zeros(IxDyn(&grid.shape()))],
                time: t,
            })
        }
        FlowSpec::Cellular {
            amplitude,
            cell_scale,
        } => {
            if grid.dim() != 2 {
                return Err(Error::InvalidParameter(
                    "cellular flow requires a 2-dimensional grid".into(),
                ));
            }
            let q_real = 1.0 / cell_scale;
            let q = q_real.round();
            if *cell_scale <= 0.0 || (q_real - q).abs() > 1e-9 || q < 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "cell scale must be the reciprocal of a positive integer, got {cell_scale}"
                )));
            }
            let m = grid.points_per_axis();
            let mut v1 = ArrayD::zeros(IxDyn(&grid.shape()));
            let mut v2 = ArrayD::zeros(IxDyn(&grid.shape()));
            let w = 2.0 * PI * q;
            for (idx, out) in v1.indexed_iter_mut() {
                let x = idx.slice()[0] as f64 / m as f64;
                let y = idx.slice()[1] as f64 / m as f64;
                *out = -2.0 * PI * amplitude * (w * x).sin() * (w * y).cos();
            }
            for (idx, out) in v2.indexed_iter_mut() {
                let x = idx.slice()[0] as f64 / m as f64;
                let y = idx.slice()[1] as f64 / m as f64;
                *out = 2.0 * PI * amplitude * (w * x).cos() * (w * y).sin();
            }
            Ok(VelocitySample {
                components: vec![v1, v2],
                time: t,
            })
        }
        FlowSpec::RescaledMixing { base, amplitude } => {
            let mut inner = evaluate_flow(base, grid, amplitude * t)?;
            for c in &mut inner.components {
                c.mapv_inplace(|v| amplitude * v);
            }
            inner.time = t;
            Ok(inner)
        }
        FlowSpec::Custom { grid: g, components } => {
            if *g != grid {
                return Err(Error::DimensionMismatch {
                    expected: format!("{g:?}"),
                    got: format!("{grid:?}"),
                });
            }
            Ok(VelocitySample {
                components: components.clone(),
                time: t,
            })
        }
    }
}

/// Maximal pointwise spectral divergence of the flow at `t = 0`.
pub fn check_incompressible(spec: &FlowSpec, grid: Grid) -> Result<f64> {
    let sample = evaluate_flow(spec, grid, 0.0)?;
    let mut div: Option<ArrayD<Complex64>> = None;
    for (j, comp) in sample.components.iter().enumerate() {
        let field = SpectralField::from_samples(grid, comp)?;
        let d = field.gradient().swap_remove(j);
        let c = d.coeffs().clone();
        div = Some(match div {
            None => c,
            Some(acc) => acc + c,
        });
    }
    let div = SpectralField::from_coeffs(grid, div.expect("dim >= 1"))?;
    let worst = div
        .to_samples()
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    Ok(worst)
}

/// Evaluate the `j`-th derivative of a 1-D spectral field at arbitrary `x`
/// by direct summation of the trigonometric series.
fn eval_trig_series(field: &SpectralField, order: u32, x: f64) -> f64 {
    let mut acc = Complex64::default();
    for (k, c) in field.iter_freq() {
        let ik = Complex64::new(0.0, 2.0 * PI * k[0] as f64);
        let phase = Complex64::from_polar(1.0, 2.0 * PI * k[0] as f64 * x);
        acc += c * ik.powu(order) * phase;
    }
    acc.re
}

fn bisect_zero(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if (flo <= 0.0) == (fmid <= 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Locate the critical points of a sampled shear profile and return the
/// maximal order `m`: at a critical point where derivatives `1..=j` vanish
/// (relative tolerance `1e-6 * ||v1||_{H^i}` for the `i`-th), the order is
/// `j + 1`. Both sign-crossing zeros of `v1'` and touching zeros (located
/// through sign changes of `v1''`) are examined.
pub fn shear_critical_order(profile: &[f64]) -> Result<usize> {
    let m_pts = profile.len();
    let grid = Grid::new(1, m_pts)?;
    let arr = ArrayD::from_shape_vec(IxDyn(&[m_pts]), profile.to_vec()).expect("length matches");
    let field = SpectralField::from_samples(grid, &arr)?;

    let h1 = field.sobolev_norm(SobolevSpec::inhomogeneous(1.0));
    let deriv_scale = |i: u32| field.sobolev_norm(SobolevSpec::inhomogeneous(i as f64));
    if field.project_mean_zero().l2_norm() < 1e-12 * field.l2_norm().max(1e-300)
        || h1 < 1e-12
    {
        return Err(Error::NoShearing);
    }
    let d1 = |x: f64| eval_trig_series(&field, 1, x);
    let d2 = |x: f64| eval_trig_series(&field, 2, x);
    // A nonconstant profile whose first derivative never leaves the noise
    // floor also cannot shear.
    let tol1 = 1e-6 * deriv_scale(1);
    let max_d1 = (0..m_pts)
        .map(|i| d1(i as f64 / m_pts as f64).abs())
        .fold(0.0f64, f64::max);
    if max_d1 < tol1 {
        return Err(Error::NoShearing);
    }

    let mut candidates: Vec<f64> = Vec::new();
    let probes = 4 * m_pts;
    for i in 0..probes {
        let a = i as f64 / probes as f64;
        let b = (i + 1) as f64 / probes as f64;
        if (d1(a) <= 0.0) != (d1(b) <= 0.0) {
            candidates.push(bisect_zero(&d1, a, b));
        }
        if (d2(a) <= 0.0) != (d2(b) <= 0.0) {
            let x = bisect_zero(&d2, a, b);
            if d1(x).abs() < tol1 {
                candidates.push(x);
            }
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    if candidates.is_empty() {
        return Err(Error::NoShearing);
    }

    const MAX_ORDER: u32 = 8;
    let mut m_order = 0usize;
    for &x in &candidates {
        let mut vanishing = 0usize;
        for i in 1..=MAX_ORDER {
            let tol = 1e-6 * deriv_scale(i);
            if eval_trig_series(&field, i, x).abs() < tol {
                vanishing = i as usize;
            } else {
                break;
            }
        }
        if vanishing == 0 {
            // spurious candidate from the second-derivative scan
            continue;
        }
        m_order = m_order.max(vanishing + 1);
    }
    if m_order == 0 {
        return Err(Error::NoShearing);
    }
    Ok(m_order)
}
