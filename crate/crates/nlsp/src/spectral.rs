//! Real-to-complex Fourier representation of scalar fields on the unit torus
//! `T^N = [0,1)^N`, together with the heat semigroup, Sobolev norms, spectral
//! differentiation and dealiasing.
//!
//! Conventions used throughout the crate:
//!
//! * frequencies are integer vectors `k` with components in
//!   `{-M/2+1, ..., M/2}` for a grid of `M` points per axis;
//! * the coefficient array is normalized so that `coeffs(0)` equals the
//!   spatial mean of the field;
//! * the Laplacian eigenvalue at frequency `k` is `-4 pi^2 |k|^2` (physical
//!   Laplacian on the unit torus), so the slowest mean-zero decay rate is
//!   `lambda_1 = 4 pi^2`.

use std::cell::RefCell;
use std::f64::consts::PI;

use ndarray::{ArrayD, Dimension, IxDyn};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Smallest positive eigenvalue of `-Delta` on the unit torus.
pub const LAMBDA_1: f64 = 4.0 * PI * PI;

/// Uniform periodic grid on `T^N`, `N` in {1, 2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    dim: usize,
    points_per_axis: usize,
}

impl Grid {
    pub fn new(dim: usize, points_per_axis: usize) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidParameter(format!(
                "grid dimension must be 1 or 2, got {dim}"
            )));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "points per axis must be a power of two >= 8, got {points_per_axis}"
            )));
        }
        Ok(Self {
            dim,
            points_per_axis,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.points_per_axis as f64
    }

    /// Total number of physical samples, `M^N`.
    pub fn total_points(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.points_per_axis; self.dim]
    }

    /// Signed frequency for an array index along one axis.
    pub fn frequency(&self, index: usize) -> i64 {
        let m = self.points_per_axis as i64;
        let i = index as i64;
        if i <= m / 2 {
            i
        } else {
            i - m
        }
    }

    /// Array index holding frequency `k` along one axis.
    pub fn index_of(&self, k: i64) -> usize {
        let m = self.points_per_axis as i64;
        debug_assert!(k > -m / 2 && k <= m / 2);
        k.rem_euclid(m) as usize
    }

    /// Physical coordinates of the sample at a multi-index.
    pub fn coords(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .map(|&i| i as f64 / self.points_per_axis as f64)
            .collect()
    }
}

/// Sobolev norm selector: `H^s` (inhomogeneous) or `\dot H^s` (homogeneous).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevSpec {
    pub s: f64,
    pub homogeneous: bool,
}

impl SobolevSpec {
    pub fn inhomogeneous(s: f64) -> Self {
        Self {
            s,
            homogeneous: false,
        }
    }

    pub fn homogeneous(s: f64) -> Self {
        Self {
            s,
            homogeneous: true,
        }
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    static SCRATCH: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

pub(crate) fn fft_axis(data: &mut ArrayD<Complex64>, axis: usize, m: usize, forward: bool) {
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(m)
        } else {
            p.plan_fft_inverse(m)
        }
    });
    SCRATCH.with(|s| {
        let mut scratch = s.borrow_mut();
        scratch.resize(fft.get_inplace_scratch_len(), Complex64::default());
        match data.ndim() {
            1 => {
                let slice = data.as_slice_mut().expect("standard layout");
                fft.process_with_scratch(slice, &mut scratch);
            }
            2 => {
                if axis == 1 {
                    // rows are contiguous in standard layout
                    let slice = data.as_slice_mut().expect("standard layout");
                    for row in slice.chunks_exact_mut(m) {
                        fft.process_with_scratch(row, &mut scratch);
                    }
                } else {
                    let mut col = vec![Complex64::default(); m];
                    for j in 0..m {
                        for i in 0..m {
                            col[i] = data[[i, j]];
                        }
                        fft.process_with_scratch(&mut col, &mut scratch);
                        for i in 0..m {
                            data[[i, j]] = col[i];
                        }
                    }
                }
            }
            _ => unreachable!("grids are 1- or 2-dimensional"),
        }
    });
}

fn fft_nd(data: &mut ArrayD<Complex64>, grid: &Grid, forward: bool) {
    let m = grid.points_per_axis();
    for axis in 0..grid.dim() {
        fft_axis(data, axis, m, forward);
    }
}

/// Complex Fourier coefficients of a real scalar field.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid,
    coeffs: ArrayD<Complex64>,
    is_mean_zero: bool,
}

impl SpectralField {
    /// Wrap a coefficient array; recomputes the mean-zero flag.
    pub fn from_coeffs(grid: Grid, coeffs: ArrayD<Complex64>) -> Result<Self> {
        if coeffs.shape() != grid.shape().as_slice() {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", grid.shape()),
                got: format!("{:?}", coeffs.shape()),
            });
        }
        let mut field = Self {
            grid,
            coeffs,
            is_mean_zero: false,
        };
        field.refresh_mean_flag();
        Ok(field)
    }

    pub fn zero(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: ArrayD::zeros(IxDyn(&grid.shape())),
            is_mean_zero: true,
        }
    }

    /// Forward transform of real samples; `coeffs(0)` becomes the mean.
    pub fn from_samples(grid: Grid, samples: &ArrayD<f64>) -> Result<Self> {
        if samples.shape() != grid.shape().as_slice() {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", grid.shape()),
                got: format!("{:?}", samples.shape()),
            });
        }
        let mut coeffs = samples.mapv(|v| Complex64::new(v, 0.0));
        fft_nd(&mut coeffs, &grid, true);
        let scale = 1.0 / grid.total_points() as f64;
        coeffs.mapv_inplace(|c| c * scale);
        Self::from_coeffs(grid, coeffs)
    }

    /// Build a field by sampling a function of the coordinates.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let shape = grid.shape();
        let mut samples = ArrayD::zeros(IxDyn(&shape));
        for (idx, v) in samples.indexed_iter_mut() {
            let coords = grid.coords(idx.slice());
            *v = f(&coords);
        }
        Self::from_samples(grid, &samples).expect("shape matches by construction")
    }

    /// Inverse transform back to real samples (imaginary parts discarded).
    pub fn to_samples(&self) -> ArrayD<f64> {
        let mut data = self.coeffs.clone();
        fft_nd(&mut data, &self.grid, false);
        data.mapv(|c| c.re)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &ArrayD<Complex64> {
        &self.coeffs
    }

    pub fn is_mean_zero(&self) -> bool {
        self.is_mean_zero
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[IxDyn(&vec![0; self.grid.dim()])].re
    }

    /// Coefficient at integer frequency vector `k`.
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        let idx: Vec<usize> = k.iter().map(|&kj| self.grid.index_of(kj)).collect();
        self.coeffs[IxDyn(&idx)]
    }

    pub fn set_coeff(&mut self, k: &[i64], value: Complex64) {
        let idx: Vec<usize> = k.iter().map(|&kj| self.grid.index_of(kj)).collect();
        self.coeffs[IxDyn(&idx)] = value;
        self.refresh_mean_flag();
    }

    fn refresh_mean_flag(&mut self) {
        let c0 = self.coeffs[IxDyn(&vec![0; self.grid.dim()])];
        let l2 = self.sobolev_norm(SobolevSpec::inhomogeneous(0.0));
        self.is_mean_zero = c0.norm() <= 1e-12 * l2.max(f64::MIN_POSITIVE);
    }

    /// Iterate (frequency vector, coefficient) pairs.
    pub fn iter_freq(&self) -> impl Iterator<Item = (Vec<i64>, Complex64)> + '_ {
        self.coeffs.indexed_iter().map(move |(idx, &c)| {
            let k: Vec<i64> = idx.slice().iter().map(|&i| self.grid.frequency(i)).collect();
            (k, c)
        })
    }

    /// Apply a multiplier `g(|k|^2 * 4 pi^2, k)` to every coefficient.
    fn apply_multiplier(&self, f: impl Fn(&[i64]) -> Complex64) -> Self {
        let grid = self.grid;
        let mut coeffs = self.coeffs.clone();
        for (idx, c) in coeffs.indexed_iter_mut() {
            let k: Vec<i64> = idx.slice().iter().map(|&i| grid.frequency(i)).collect();
            *c *= f(&k);
        }
        Self::from_coeffs(grid, coeffs).expect("shape preserved")
    }

    /// Heat semigroup `e^{t kappa Delta}`: multiply each coefficient by
    /// `exp(-kappa 4 pi^2 |k|^2 t)`. The mean mode is unchanged.
    pub fn heat_semigroup(&self, t: f64, kappa: f64) -> Result<Self> {
        if t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "heat semigroup time must be nonnegative, got {t}"
            )));
        }
        if kappa <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "diffusivity must be positive, got {kappa}"
            )));
        }
        Ok(self.apply_multiplier(|k| {
            let k2: f64 = k.iter().map(|&kj| (kj * kj) as f64).sum();
            Complex64::new((-kappa * LAMBDA_1 * k2 * t).exp(), 0.0)
        }))
    }

    /// `(Sum_k w(k) |u_k|^2)^{1/2}` with `w(k) = (1 + 4pi^2|k|^2)^s` or
    /// `(4pi^2|k|^2)^s` over `k != 0` in the homogeneous case.
    pub fn sobolev_norm(&self, spec: SobolevSpec) -> f64 {
        let mut total = 0.0;
        for (idx, c) in self.coeffs.indexed_iter() {
            let k2: f64 = idx
                .slice()
                .iter()
                .map(|&i| {
                    let k = self.grid.frequency(i);
                    (k * k) as f64
                })
                .sum();
            let w = if spec.homogeneous {
                if k2 == 0.0 {
                    continue;
                }
                (LAMBDA_1 * k2).powf(spec.s)
            } else {
                (1.0 + LAMBDA_1 * k2).powf(spec.s)
            };
            total += w * c.norm_sqr();
        }
        total.sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(SobolevSpec::inhomogeneous(0.0))
    }

    /// `||grad u||_{L^2}`, equal to the homogeneous H^1 norm.
    pub fn h1_seminorm(&self) -> f64 {
        self.sobolev_norm(SobolevSpec::homogeneous(1.0))
    }

    /// Spectral gradient: component `j` has coefficients `2 pi i k_j u_k`.
    pub fn gradient(&self) -> Vec<SpectralField> {
        (0..self.grid.dim())
            .map(|j| {
                self.apply_multiplier(|k| Complex64::new(0.0, 2.0 * PI * k[j] as f64))
            })
            .collect()
    }

    /// Zero the mean mode.
    pub fn project_mean_zero(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[IxDyn(&vec![0; self.grid.dim()])] = Complex64::default();
        out.is_mean_zero = true;
        out
    }

    /// Zero every coefficient with any `|k_j| > fraction * M/2`.
    pub fn dealias(&self, fraction: f64) -> Self {
        let cutoff = fraction * self.grid.points_per_axis() as f64 / 2.0;
        let grid = self.grid;
        let mut coeffs = self.coeffs.clone();
        for (idx, c) in coeffs.indexed_iter_mut() {
            let over = idx
                .slice()
                .iter()
                .any(|&i| (grid.frequency(i).abs() as f64) > cutoff);
            if over {
                *c = Complex64::default();
            }
        }
        Self::from_coeffs(grid, coeffs).expect("shape preserved")
    }

    /// Maximal violation of `coeffs(-k) = conj(coeffs(k))`.
    pub fn hermitian_error(&self) -> f64 {
        let m = self.grid.points_per_axis();
        let mut worst = 0.0f64;
        for (idx, &c) in self.coeffs.indexed_iter() {
            let conj_idx: Vec<usize> = idx.slice().iter().map(|&i| (m - i) % m).collect();
            let pair = self.coeffs[IxDyn(&conj_idx)];
            worst = worst.max((pair - c.conj()).norm());
        }
        worst
    }

    /// Linear combination `a*self + b*other`.
    pub fn lin_comb(&self, a: f64, other: &SpectralField, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", self.grid),
                got: format!("{:?}", other.grid),
            });
        }
        let coeffs = &self.coeffs * Complex64::new(a, 0.0)
            + &other.coeffs * Complex64::new(b, 0.0);
        Self::from_coeffs(self.grid, coeffs)
    }

    pub fn scale(&self, a: f64) -> Self {
        let coeffs = &self.coeffs * Complex64::new(a, 0.0);
        Self::from_coeffs(self.grid, coeffs).expect("shape preserved")
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Mean of `g(u(x))` over the torus by the rectangle rule, which is the
/// spectrally accurate quadrature on a periodic uniform grid.
pub fn quadrature_mean(samples: &ArrayD<f64>, g: impl Fn(f64) -> f64) -> f64 {
    let n = samples.len() as f64;
    samples.iter().map(|&v| g(v)).sum::<f64>() / n
}

/// Pseudo-spectral product: transform both fields to physical space,
/// multiply pointwise, transform back and dealias.
pub fn pseudo_product(a: &SpectralField, b: &SpectralField, dealias_fraction: f64) -> Result<SpectralField> {
    if a.grid() != b.grid() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", a.grid()),
            got: format!("{:?}", b.grid()),
        });
    }
    let pa = a.to_samples();
    let pb = b.to_samples();
    let prod = &pa * &pb;
    Ok(SpectralField::from_samples(a.grid(), &prod)?.dealias(dealias_fraction))
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;

    /// Naive O(n^2) DFT with the same normalization as `from_samples`;
    /// independent oracle for the FFT path.
    pub fn naive_dft(grid: Grid, samples: &ArrayD<f64>) -> ArrayD<Complex64> {
        let shape = grid.shape();
        let mut out = ArrayD::<Complex64>::zeros(IxDyn(&shape));
        let total = grid.total_points() as f64;
        for (out_idx, o) in out.indexed_iter_mut() {
            let k: Vec<i64> = out_idx
                .slice()
                .iter()
                .map(|&i| grid.frequency(i))
                .collect();
            let mut acc = Complex64::default();
            for (s_idx, &v) in samples.indexed_iter() {
                let x = grid.coords(s_idx.slice());
                let phase: f64 = k
                    .iter()
                    .zip(&x)
                    .map(|(&kj, &xj)| kj as f64 * xj)
                    .sum::<f64>();
                acc += Complex64::from_polar(v, -2.0 * PI * phase);
            }
            *o = acc / total;
        }
        out
    }

    pub fn random_field(grid: Grid, seed: u64) -> SpectralField {
        let mut rng = crate::rng::CounterRng::new(seed);
        let shape = grid.shape();
        let mut samples = ArrayD::zeros(IxDyn(&shape));
        for v in samples.iter_mut() {
            *v = rng.next_in(-1.0, 1.0);
        }
        SpectralField::from_samples(grid, &samples).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_util::*;
    use super::*;
    use proptest::prelude::*;

    fn grid2(m: usize) -> Grid {
        Grid::new(2, m).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(3, 32).is_err());
        assert!(Grid::new(2, 12).is_err());
        assert!(Grid::new(2, 4).is_err());
        assert!(Grid::new(1, 8).is_ok());
    }

    #[test]
    fn frequency_layout() {
        let g = Grid::new(1, 8).unwrap();
        let freqs: Vec<i64> = (0..8).map(|i| g.frequency(i)).collect();
        assert_eq!(freqs, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        for k in -3..=4 {
            assert_eq!(g.frequency(g.index_of(k)), k);
        }
    }

    #[test]
    fn constant_field_transforms_to_mean_mode() {
        let g = grid2(16);
        let f = SpectralField::from_fn(g, |_| 2.5);
        assert!((f.coeff(&[0, 0]) - Complex64::new(2.5, 0.0)).norm() < 1e-13);
        let others: f64 = f
            .iter_freq()
            .filter(|(k, _)| k.iter().any(|&kj| kj != 0))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        assert!(others < 1e-13);
    }

    #[test]
    fn single_sine_mode_coefficients() {
        let g = grid2(32);
        let f = SpectralField::from_fn(g, |x| (2.0 * PI * x[0]).sin());
        // sin(2 pi x1) = -i/2 e^{2 pi i x1} + i/2 e^{-2 pi i x1}
        assert!((f.coeff(&[1, 0]) - Complex64::new(0.0, -0.5)).norm() < 1e-12);
        assert!((f.coeff(&[-1, 0]) - Complex64::new(0.0, 0.5)).norm() < 1e-12);
        let rest: f64 = f
            .iter_freq()
            .filter(|(k, _)| !(k[1] == 0 && k[0].abs() == 1))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        assert!(rest < 1e-12);
    }

    #[test]
    fn fft_matches_naive_dft_and_is_hermitian() {
        for dim in [1, 2] {
            let g = Grid::new(dim, 8).unwrap();
            let f = random_field(g, 31 + dim as u64);
            let samples = f.to_samples();
            let oracle = naive_dft(g, &samples);
            let worst = f
                .coeffs()
                .iter()
                .zip(oracle.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-12, "dim {dim}: fft vs naive dft {worst}");
            assert!(f.hermitian_error() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let g = grid2(16);
        let samples = ArrayD::zeros(IxDyn(&[8, 8]));
        assert!(SpectralField::from_samples(g, &samples).is_err());
    }

    #[test]
    fn heat_semigroup_identity_at_zero_time() {
        let g = grid2(16);
        let f = random_field(g, 5);
        let h = f.heat_semigroup(0.0, 1.0).unwrap();
        let diff = f
            .coeffs()
            .iter()
            .zip(h.coeffs().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert_eq!(diff, 0.0);
    }

    #[test]
    fn heat_semigroup_single_mode_decay() {
        let g = grid2(32);
        let f = SpectralField::from_fn(g, |x| (2.0 * PI * x[0]).sin());
        let h = f.heat_semigroup(0.01, 1.0).unwrap();
        let expected = (-4.0 * PI * PI * 0.01).exp(); // ~ 0.6738
        assert!((expected - 0.6738).abs() < 1e-4);
        let ratio = h.coeff(&[1, 0]).norm() / f.coeff(&[1, 0]).norm();
        assert!((ratio - expected).abs() < 1e-12);
    }

    #[test]
    fn heat_semigroup_rejects_negative_time() {
        let g = grid2(16);
        let f = random_field(g, 6);
        assert!(f.heat_semigroup(-0.1, 1.0).is_err());
    }

    #[test]
    fn heat_semigroup_additivity() {
        let g = grid2(16);
        let f = random_field(g, 7);
        let a = f
            .heat_semigroup(0.013, 0.7)
            .unwrap()
            .heat_semigroup(0.029, 0.7)
            .unwrap();
        let b = f.heat_semigroup(0.042, 0.7).unwrap();
        let diff = a
            .coeffs()
            .iter()
            .zip(b.coeffs().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12 * f.l2_norm());
    }

    #[test]
    fn sobolev_norms_single_mode() {
        let g = grid2(32);
        let f = SpectralField::from_fn(g, |x| (2.0 * PI * x[0]).sin());
        let l2 = f.sobolev_norm(SobolevSpec::inhomogeneous(0.0));
        assert!((l2 - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12);
        let h1 = f.sobolev_norm(SobolevSpec::homogeneous(1.0));
        assert!((h1 - 2.0 * PI / 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sobolev_norm_two_mode_negative_exponent() {
        let g = grid2(32);
        let f = SpectralField::from_fn(g, |x| {
            (2.0 * PI * x[0]).sin() + (4.0 * PI * x[1]).sin()
        });
        // hand sum: ((1/2)(2 pi)^-2 + (1/2)(4 pi)^-2)^{1/2}
        let expected =
            (0.5 / (2.0 * PI).powi(2) + 0.5 / (4.0 * PI).powi(2)).sqrt();
        let got = f.sobolev_norm(SobolevSpec::homogeneous(-1.0));
        assert!((got - expected).abs() < 1e-12, "got {got}, want {expected}");
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = grid2(16);
        let f = SpectralField::from_fn(g, |_| 3.0);
        for comp in f.gradient() {
            assert!(comp.l2_norm() < 1e-13);
        }
    }

    #[test]
    fn gradient_of_sine() {
        let g = grid2(32);
        let f = SpectralField::from_fn(g, |x| (2.0 * PI * x[0]).sin());
        let grad = f.gradient();
        let expected = SpectralField::from_fn(g, |x| 2.0 * PI * (2.0 * PI * x[0]).cos());
        let d0 = grad[0].lin_comb(1.0, &expected, -1.0).unwrap().l2_norm();
        assert!(d0 < 1e-11);
        assert!(grad[1].l2_norm() < 1e-12);
    }

    #[test]
    fn gradient_norm_matches_h1_seminorm() {
        let g = grid2(16);
        let f = random_field(g, 8).project_mean_zero();
        let grad = f.gradient();
        let grad_norm = grad
            .iter()
            .map(|c| c.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((grad_norm - f.h1_seminorm()).abs() < 1e-12 * grad_norm.max(1.0));
    }

    #[test]
    fn projection_examples() {
        let g = grid2(16);
        let c = SpectralField::from_fn(g, |_| 1.7);
        assert!(c.project_mean_zero().l2_norm() < 1e-13);

        let f = SpectralField::from_fn(g, |x| 1.7 + (2.0 * PI * x[0]).sin());
        let p = f.project_mean_zero();
        assert!(p.is_mean_zero());
        let sine = SpectralField::from_fn(g, |x| (2.0 * PI * x[0]).sin());
        assert!(p.lin_comb(1.0, &sine, -1.0).unwrap().l2_norm() < 1e-12);
        // idempotence
        let pp = p.project_mean_zero();
        assert!(pp.lin_comb(1.0, &p, -1.0).unwrap().l2_norm() < 1e-14);
    }

    #[test]
    fn dealias_keeps_low_modes_and_kills_nyquist() {
        let g = grid2(32);
        let f = SpectralField::from_fn(g, |x| {
            (2.0 * PI * 5.0 * x[0]).sin() + (2.0 * PI * 16.0 * x[1]).cos()
        });
        let d = f.dealias(2.0 / 3.0);
        assert!((d.coeff(&[5, 0]) - f.coeff(&[5, 0])).norm() < 1e-14);
        assert_eq!(d.coeff(&[0, 16]).norm(), 0.0);
    }

    #[test]
    fn pseudo_product_matches_closed_form_square() {
        // sin^2(2 pi x1) = 1/2 - 1/2 cos(4 pi x1)
        let g = grid2(32);
        let s = SpectralField::from_fn(g, |x| (2.0 * PI * x[0]).sin());
        let prod = pseudo_product(&s, &s, 2.0 / 3.0).unwrap();
        let exact = SpectralField::from_fn(g, |x| 0.5 - 0.5 * (4.0 * PI * x[0]).cos());
        let diff = prod.lin_comb(1.0, &exact, -1.0).unwrap().l2_norm();
        assert!(diff < 1e-12, "pseudo-spectral square error {diff}");
    }

    #[test]
    fn heat_contraction_on_mean_zero_fields() {
        let g = grid2(16);
        for seed in 0..10u64 {
            let f = random_field(g, 100 + seed).project_mean_zero();
            for &t in &[1e-3, 1e-2, 0.1, 1.0] {
                let h = f.heat_semigroup(t, 1.0).unwrap();
                assert!(h.l2_norm() <= (-LAMBDA_1 * t).exp() * f.l2_norm() * (1.0 + 1e-12));
            }
        }
        // equality iff supported on |k| = 1
        let single = SpectralField::from_fn(g, |x| (2.0 * PI * x[1]).sin());
        let t = 0.05;
        let h = single.heat_semigroup(t, 1.0).unwrap();
        assert!(
            (h.l2_norm() - (-LAMBDA_1 * t).exp() * single.l2_norm()).abs()
                < 1e-13
        );
    }

    #[test]
    fn fractional_smoothing_stays_below_analytic_envelope() {
        // || (-Delta)^{s/2} e^{t Delta} f || <= (s/(2e))^{s/2} t^{-s/2} ||f||
        let g = grid2(16);
        for s in [0.5, 1.0] {
            let envelope = (s / (2.0 * std::f64::consts::E)).powf(s / 2.0);
            for seed in 0..100u64 {
                let f = random_field(g, 200 + seed).project_mean_zero();
                for &t in &[1e-3, 1e-2, 0.1, 0.5, 1.0] {
                    let smoothed = f.heat_semigroup(t, 1.0).unwrap();
                    let lhs = smoothed.sobolev_norm(SobolevSpec::homogeneous(s / 2.0));
                    let bound = envelope * t.powf(-s / 2.0) * f.l2_norm();
                    assert!(
                        lhs <= bound * (1.0 + 1e-10),
                        "s={s} t={t} seed={seed}: {lhs} > {bound}"
                    );
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn round_trip_is_identity(seed in 0u64..1000, mexp in 3u32..7, dim in 1usize..3) {
            let m = 1usize << mexp; // 8..64
            let grid = Grid::new(dim, m).unwrap();
            let f = random_field(grid, seed);
            let back = SpectralField::from_samples(grid, &f.to_samples()).unwrap();
            let err = f
                .coeffs()
                .iter()
                .zip(back.coeffs().iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            prop_assert!(err < 1e-12 * f.l2_norm().max(1e-300));
        }

        #[test]
        fn parseval_under_gradient(seed in 0u64..1000) {
            let grid = Grid::new(2, 16).unwrap();
            let f = random_field(grid, seed);
            let g: f64 = f.gradient().iter().map(|c| c.l2_norm().powi(2)).sum::<f64>().sqrt();
            prop_assert!((g - f.h1_seminorm()).abs() <= 1e-10 * g.max(1.0));
        }
    }
}
