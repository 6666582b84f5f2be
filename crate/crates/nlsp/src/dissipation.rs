//! Dissipation time and enhanced-dissipation measurements for the
//! advection-diffusion generator `H_nu = -nu Delta + v . grad` on a
//! truncated mean-zero Fourier basis.
//!
//! The operator is represented in the real trigonometric basis
//! `{sqrt(2) cos(2 pi k.x), sqrt(2) sin(2 pi k.x)}` over one representative
//! of each `{k, -k}` pair with `|k|_inf <= K`. That basis is orthonormal
//! and spans the same space as the complex exponentials, the diffusion part
//! stays diagonal with entries `nu 4 pi^2 |k|^2`, incompressible advection
//! stays skew-symmetric, and all operator norms agree with the complex
//! representation - while the heavy exponential arithmetic runs in real
//! dgemm.

use ndarray::{Array2, ArrayD, Dimension, IxDyn};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{SolverConfig, Stepper};
use crate::flow::{evaluate_flow, FlowSpec, ShearProfile, VelocitySample};
use crate::linalg::{expm, top_singular_value};
use crate::rng::CounterRng;
use crate::spectral::{Grid, SobolevSpec, SpectralField, LAMBDA_1};

/// Cos/sin parity of a real basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Cos,
    Sin,
}

/// `H_nu` restricted to the mean-zero modes `|k|_inf <= K`.
pub struct TruncatedOperator {
    pub truncation: usize,
    pub nu: f64,
    /// Representative frequency and parity per basis index.
    pub modes: Vec<([i64; 2], Parity)>,
    /// Dense matrix of `H_nu` in the real trigonometric basis.
    pub matrix: Array2<f64>,
    pub time_dependent: bool,
    /// Evaluation grid used for the pseudo-spectral entry computation.
    pub eval_grid: Grid,
}

impl TruncatedOperator {
    pub fn basis_dim(&self) -> usize {
        self.modes.len()
    }

    /// Frobenius asymmetry of the advection block relative to its size;
    /// incompressible flows give a skew-symmetric block.
    pub fn advection_asymmetry(&self) -> f64 {
        let n = self.basis_dim();
        let mut adv = self.matrix.clone();
        for i in 0..n {
            let ([k1, k2], _) = self.modes[i];
            adv[[i, i]] -= self.nu * LAMBDA_1 * (k1 * k1 + k2 * k2) as f64;
        }
        let mut asym = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                asym += (adv[[i, j]] + adv[[j, i]]).powi(2);
                scale += adv[[i, j]].powi(2);
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            (asym / 4.0).sqrt() / scale.sqrt()
        }
    }

    fn is_diagonal(&self) -> bool {
        let n = self.basis_dim();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.matrix[[i, j]] != 0.0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Representatives of the `{k, -k}` pairs with `|k|_inf <= K`, ordered
/// deterministically.
fn representatives(k_trunc: usize) -> Vec<[i64; 2]> {
    let k = k_trunc as i64;
    let mut reps = Vec::new();
    for k1 in -k..=k {
        for k2 in -k..=k {
            if k1 > 0 || (k1 == 0 && k2 > 0) {
                reps.push([k1, k2]);
            }
        }
    }
    reps
}

fn basis_modes(k_trunc: usize) -> Vec<([i64; 2], Parity)> {
    let mut modes = Vec::new();
    for rep in representatives(k_trunc) {
        modes.push((rep, Parity::Cos));
        modes.push((rep, Parity::Sin));
    }
    modes
}

/// Grid large enough for alias-free matrix entries (`K <= M/3`).
fn evaluation_grid(k_trunc: usize, flow: &FlowSpec) -> Result<Grid> {
    let mut m = 8usize;
    while m / 3 < k_trunc {
        m *= 2;
    }
    // the flow itself must also fit in the alias-free band
    let probe = Grid::new(2, m)?;
    let flow_band = flow.max_frequency(&probe);
    while m / 3 < flow_band.max(k_trunc) {
        m *= 2;
    }
    Grid::new(2, m)
}

/// Build the truncated operator by applying `-nu Delta + v . grad`
/// pseudo-spectrally to each basis mode.
pub fn build_operator(flow: &FlowSpec, nu: f64, k_trunc: usize) -> Result<TruncatedOperator> {
    let grid = evaluation_grid(k_trunc, flow)?;
    build_operator_on(flow, nu, k_trunc, grid)
}

pub fn build_operator_on(
    flow: &FlowSpec,
    nu: f64,
    k_trunc: usize,
    grid: Grid,
) -> Result<TruncatedOperator> {
    if flow.is_time_dependent() {
        return Err(Error::InvalidParameter(
            "time-dependent flows use basis propagation, not a single matrix".into(),
        ));
    }
    if k_trunc == 0 {
        return Err(Error::InvalidParameter("truncation must be positive".into()));
    }
    if grid.dim() != 2 {
        return Err(Error::InvalidParameter(
            "truncated operators are built on 2-dimensional grids".into(),
        ));
    }
    let m = grid.points_per_axis();
    if k_trunc > m / 3 {
        return Err(Error::InvalidParameter(format!(
            "truncation K = {k_trunc} too large for grid M = {m} (need K <= M/3)"
        )));
    }
    if nu <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "nu must be positive, got {nu}"
        )));
    }

    let velocity = evaluate_flow(flow, grid, 0.0)?;
    let modes = basis_modes(k_trunc);
    let n = modes.len();
    let mut matrix = Array2::<f64>::zeros((n, n));
    let shape = grid.shape();
    let two_pi = 2.0 * std::f64::consts::PI;
    let sqrt2 = 2.0_f64.sqrt();

    let mut advected = ArrayD::<f64>::zeros(IxDyn(&shape));
    for (col, &([k1, k2], parity)) in modes.iter().enumerate() {
        // v . grad b sampled directly from the analytic gradient of the
        // basis function
        for (idx, out) in advected.indexed_iter_mut() {
            let x = idx.slice()[0] as f64 / m as f64;
            let y = idx.slice()[1] as f64 / m as f64;
            let phase = two_pi * (k1 as f64 * x + k2 as f64 * y);
            let v1 = velocity.components[0][idx.slice()];
            let v2 = velocity.components[1][idx.slice()];
            let k_dot_v = k1 as f64 * v1 + k2 as f64 * v2;
            *out = match parity {
                Parity::Cos => -two_pi * k_dot_v * sqrt2 * phase.sin(),
                Parity::Sin => two_pi * k_dot_v * sqrt2 * phase.cos(),
            };
        }
        let transformed = SpectralField::from_samples(grid, &advected)?;
        for (row, &([m1, m2], row_parity)) in modes.iter().enumerate() {
            let c = transformed.coeff(&[m1, m2]);
            let entry = match row_parity {
                Parity::Cos => sqrt2 * c.re,
                Parity::Sin => -sqrt2 * c.im,
            };
            matrix[[row, col]] = entry;
        }
        // exact diagonal diffusion
        matrix[[col, col]] += nu * LAMBDA_1 * (k1 * k1 + k2 * k2) as f64;
    }

    Ok(TruncatedOperator {
        truncation: k_trunc,
        nu,
        modes,
        matrix,
        time_dependent: false,
        eval_grid: grid,
    })
}

/// `||exp(-t H)||_{L^2_0 -> L^2_0}`: the largest singular value of the
/// propagator, by scaling-and-squaring matrix exponential plus power
/// iteration (diagonal operators take the exact scalar path).
pub fn solution_operator_norm(op: &TruncatedOperator, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "propagation time must be nonnegative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    if op.is_diagonal() {
        let mut worst = 0.0f64;
        for i in 0..op.basis_dim() {
            worst = worst.max((-t * op.matrix[[i, i]]).exp());
        }
        return Ok(worst);
    }
    let propagator = expm(&(&op.matrix * (-t)))?;
    let est = top_singular_value(&propagator, 1e-8, 500);
    Ok(est.sigma)
}

/// Dissipation-time estimate with its bisection metadata.
#[derive(Debug, Clone)]
pub struct DissipationTimeResult {
    pub tau_star: f64,
    pub truncation: usize,
    pub bisection_tol: f64,
    /// Evaluated points of `t -> ||S_{0,t}||`, sorted by `t`.
    pub norm_curve: Vec<(f64, f64)>,
}

/// Smallest `t` with `||S_{0,t}|| <= 1/2`, located by bisection. For
/// autonomous flows the supremum over start times collapses, so the
/// operator norm of a single matrix exponential decides.
///
/// Every incompressible flow satisfies `||S_{0,t}|| <= e^{-nu lambda_1 t}`,
/// so the bracket `[0, 2 ln 2 / (nu lambda_1)]` always contains the
/// crossing, and the norm is nonincreasing in `t` (sup over trajectories of
/// decreasing `L^2` norms), which makes bisection valid.
pub fn dissipation_time(
    flow: &FlowSpec,
    nu: f64,
    k_trunc: usize,
    tol: f64,
) -> Result<DissipationTimeResult> {
    let op = build_operator(flow, nu, k_trunc)?;
    dissipation_time_of_operator(&op, tol)
}

pub fn dissipation_time_of_operator(
    op: &TruncatedOperator,
    tol: f64,
) -> Result<DissipationTimeResult> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "bisection tolerance must be positive, got {tol}"
        )));
    }
    let mut curve = Vec::new();
    let mut eval = |t: f64| -> Result<f64> {
        let norm = solution_operator_norm(op, t)?;
        curve.push((t, norm));
        Ok(norm)
    };

    let mut lo = 0.0f64;
    let mut hi = 2.0 * std::f64::consts::LN_2 / (op.nu * LAMBDA_1);
    let norm_hi = eval(hi)?;
    if norm_hi > 0.5 {
        return Err(Error::Bracket(format!(
            "norm at bracket top t = {hi:.6e} is {norm_hi:.6} > 1/2; truncation too coarse"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau_star = hi;
    // monotone validation
    let check = eval(tau_star + tol)?;
    if check > 0.5 + 1e-6 {
        return Err(Error::Bracket(format!(
            "norm fails to stay below 1/2 just past tau* ({check:.8} at t = {:.6e})",
            tau_star + tol
        )));
    }
    curve.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(DissipationTimeResult {
        tau_star,
        truncation: op.truncation,
        bisection_tol: tol,
        norm_curve: curve,
    })
}

/// Dissipation time for time-dependent flows: the solution operator
/// `S_{s,s+t}` is obtained by propagating every basis vector through the
/// linear stepper, and the supremum over start times is sampled on
/// `s_grid`.
pub fn dissipation_time_unsteady(
    flow: &FlowSpec,
    nu: f64,
    k_trunc: usize,
    tol: f64,
    s_grid: &[f64],
    dt: f64,
) -> Result<DissipationTimeResult> {
    if s_grid.is_empty() {
        return Err(Error::InvalidParameter("empty start-time grid".into()));
    }
    let grid = evaluation_grid(k_trunc, flow)?;
    let modes = basis_modes(k_trunc);
    let mut tau_star = 0.0f64;
    let mut curve = Vec::new();
    let hi0 = 2.0 * std::f64::consts::LN_2 / (nu * LAMBDA_1);
    for &s in s_grid {
        let norm_at = |t: f64| -> Result<f64> {
            let mat = propagate_basis(flow, nu, &modes, grid, s, t, dt)?;
            let est = top_singular_value(&mat, 1e-8, 500);
            Ok(est.sigma)
        };
        let mut lo = 0.0f64;
        let mut hi = hi0;
        let top = norm_at(hi)?;
        curve.push((hi, top));
        if top > 0.5 {
            return Err(Error::Bracket(format!(
                "norm at bracket top is {top:.6} > 1/2 for start time {s}"
            )));
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let norm = norm_at(mid)?;
            curve.push((mid, norm));
            if norm > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        tau_star = tau_star.max(hi);
    }
    curve.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(DissipationTimeResult {
        tau_star,
        truncation: k_trunc,
        bisection_tol: tol,
        norm_curve: curve,
    })
}

/// Propagate the identity on the truncated basis through the linear
/// advection-diffusion stepper from `s` to `s + t`; columns are the evolved
/// basis vectors expressed in the same basis.
fn propagate_basis(
    flow: &FlowSpec,
    nu: f64,
    modes: &[([i64; 2], Parity)],
    grid: Grid,
    s: f64,
    t: f64,
    dt: f64,
) -> Result<Array2<f64>> {
    let n = modes.len();
    let mut out = Array2::<f64>::zeros((n, n));
    if t == 0.0 {
        for i in 0..n {
            out[[i, i]] = 1.0;
        }
        return Ok(out);
    }
    let steps = (t / dt).ceil().max(1.0) as usize;
    let config = SolverConfig {
        nu,
        dt: t / steps as f64,
        t_end: t,
        flow: flow.clone(),
        nonlinearity_enabled: false,
        enforce_mean_zero: true,
        method: crate::evolution::Method::Etdrk2,
        ..Default::default()
    };
    let stepper = Stepper::new(grid, config)?;
    let sqrt2 = 2.0_f64.sqrt();
    let two_pi = 2.0 * std::f64::consts::PI;
    let m = grid.points_per_axis();
    for (col, &([k1, k2], parity)) in modes.iter().enumerate() {
        let mut samples = ArrayD::<f64>::zeros(IxDyn(&grid.shape()));
        for (idx, v) in samples.indexed_iter_mut() {
            let x = idx.slice()[0] as f64 / m as f64;
            let y = idx.slice()[1] as f64 / m as f64;
            let phase = two_pi * (k1 as f64 * x + k2 as f64 * y);
            *v = match parity {
                Parity::Cos => sqrt2 * phase.cos(),
                Parity::Sin => sqrt2 * phase.sin(),
            };
        }
        let mut field = SpectralField::from_samples(grid, &samples)?;
        let h = t / steps as f64;
        for q in 0..steps {
            field = stepper.step(&field, s + q as f64 * h)?;
        }
        for (row, &([m1, m2], row_parity)) in modes.iter().enumerate() {
            let c = field.coeff(&[m1, m2]);
            out[[row, col]] = match row_parity {
                Parity::Cos => sqrt2 * c.re,
                Parity::Sin => -sqrt2 * c.im,
            };
        }
    }
    Ok(out)
}

/// Per-viscosity decay measurement inside an enhanced-dissipation fit.
#[derive(Debug, Clone, Copy)]
pub struct PerNuDecay {
    pub nu: f64,
    /// Raw fitted late-time decay rate of `||u_perp(t)||`.
    pub lambda: f64,
    /// Rate in excess of the bare diffusion of the slowest non-sheared
    /// mode, `lambda - nu lambda_1`. This is the enhanced-dissipation rate
    /// proper; at moderate viscosities the raw gap still carries the
    /// diffusive floor additively.
    pub lambda_excess: f64,
    pub fit_r_squared: f64,
}

/// Result of regressing the excess rate `log(lambda_nu - nu lambda_1)`
/// against `log nu`.
#[derive(Debug, Clone)]
pub struct EnhancedDissipationFit {
    /// Estimate of the exponent (`2/(2+m)` for shear with order-`m`
    /// critical points).
    pub exponent: f64,
    /// Estimate of `log c_0`.
    pub log_prefactor: f64,
    pub r_squared: f64,
    pub per_nu: Vec<PerNuDecay>,
}

impl EnhancedDissipationFit {
    /// Enhanced rate predicted at a viscosity, `c_0 nu^exponent`.
    pub fn rate_at(&self, nu: f64) -> f64 {
        self.log_prefactor.exp() * nu.powf(self.exponent)
    }
}

/// For each viscosity, evolve a random zero-`x1`-average field under
/// `H_nu` and fit its late-time exponential decay rate; then regress the
/// rates against the viscosities on log-log axes.
pub fn enhanced_dissipation_fit(
    flow: &FlowSpec,
    nu_list: &[f64],
    k_trunc: usize,
    seed: u64,
) -> Result<EnhancedDissipationFit> {
    let critical_order = match flow {
        FlowSpec::Shear { critical_order, .. } => *critical_order,
        _ => {
            return Err(Error::InvalidParameter(
                "enhanced-dissipation fit requires a shear flow".into(),
            ))
        }
    };
    if nu_list.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "need at least 4 viscosities, got {}",
            nu_list.len()
        )));
    }
    let max = nu_list.iter().cloned().fold(f64::MIN, f64::max);
    let min = nu_list.iter().cloned().fold(f64::MAX, f64::min);
    if min <= 0.0 || max / min < 10f64.powf(1.25) {
        return Err(Error::InvalidParameter(format!(
            "viscosities must be positive and span at least 1.25 decades, got {:.2}",
            (max / min.max(f64::MIN_POSITIVE)).log10()
        )));
    }

    let mut per_nu = Vec::new();
    for &nu in nu_list {
        let lambda = decay_rate_under_operator(flow, nu, k_trunc, critical_order, seed)?;
        per_nu.push(lambda);
    }
    let xs: Vec<f64> = per_nu.iter().map(|p| p.nu.ln()).collect();
    let ys: Vec<f64> = per_nu.iter().map(|p| p.lambda_excess.ln()).collect();
    let (slope, intercept, r2) = crate::diagnostics::linear_fit(&xs, &ys);
    Ok(EnhancedDissipationFit {
        exponent: slope,
        log_prefactor: intercept,
        r_squared: r2,
        per_nu,
    })
}

fn decay_rate_under_operator(
    flow: &FlowSpec,
    nu: f64,
    k_trunc: usize,
    critical_order: usize,
    seed: u64,
) -> Result<PerNuDecay> {
    let op = build_operator(flow, nu, k_trunc)?;
    let n = op.basis_dim();
    // random data supported on the k1 != 0 modes
    let mut rng = CounterRng::new(seed ^ 0x9e3779b97f4a7c15);
    let mut w = vec![0.0f64; n];
    for (i, &([k1, _], _)) in op.modes.iter().enumerate() {
        if k1 != 0 {
            w[i] = rng.next_normal();
        }
    }
    let norm0 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm0 == 0.0 {
        return Err(Error::Numerical("empty perp initial data".into()));
    }

    // two passes: crude rate guess sets the window, then the fit refines it
    let mut lambda_guess = nu.powf(2.0 / (2.0 + critical_order as f64)).max(nu * LAMBDA_1);
    let mut result = None;
    for _pass in 0..2 {
        let t_final = 6.0 / lambda_guess;
        let n_samples = 48usize;
        let dt = t_final / n_samples as f64;
        let step = expm(&(&op.matrix * (-dt)))?;
        let mut state = ndarray::Array1::from_vec(w.clone());
        let mut series = Vec::with_capacity(n_samples + 1);
        series.push((0.0, norm0));
        for i in 1..=n_samples {
            state = step.dot(&state);
            let norm = state.iter().map(|v| v * v).sum::<f64>().sqrt();
            series.push((i as f64 * dt, norm));
        }
        let window: Vec<(f64, f64)> = series
            .iter()
            .cloned()
            .filter(|(t, v)| *t >= 0.2 * t_final && *v > 1e-280)
            .collect();
        let fit = crate::diagnostics::decay_fit(&window)?;
        lambda_guess = fit.rate.max(nu * LAMBDA_1 * 1e-3);
        result = Some(PerNuDecay {
            nu,
            lambda: fit.rate,
            lambda_excess: (fit.rate - nu * LAMBDA_1).max(1e-12),
            fit_r_squared: fit.r_squared,
        });
    }
    let result = result.expect("two passes ran");
    if result.fit_r_squared < 0.9 {
        return Err(Error::Numerical(format!(
            "non-exponential decay window for nu = {nu}: R^2 = {:.4}, rate = {:.4e}",
            result.fit_r_squared, result.lambda
        )));
    }
    Ok(result)
}

/// Exact free transport under a shear in the mixed representation
/// `u_hat(k1, x2, t) = u_hat(k1, x2, 0) e^{-2 pi i k1 v1(x2) t}`, reporting
/// the `H^{-1}` norm at the requested times. Modes with `k1 = 0` are
/// removed first (transport acts trivially there).
pub fn pure_transport_mixing(
    u0: &SpectralField,
    profile: &ShearProfile,
    times: &[f64],
) -> Result<Vec<f64>> {
    let grid = u0.grid();
    if grid.dim() != 2 {
        return Err(Error::InvalidParameter(
            "pure transport mixing requires a 2-dimensional grid".into(),
        ));
    }
    let m = grid.points_per_axis();
    let v1 = profile.sample(m)?;

    // mixed representation u_hat(k1, x2): inverse transform along x2 only
    let mut mixed = u0.coeffs().clone();
    for i1 in 0..m {
        if grid.frequency(i1) == 0 {
            for i2 in 0..m {
                mixed[[i1, i2]] = Complex64::default(); // drop sheared-average modes
            }
        }
    }
    crate::spectral::fft_axis(&mut mixed, 1, m, false);

    let spec = SobolevSpec::homogeneous(-1.0);
    let mut norms = Vec::with_capacity(times.len());
    for &t in times {
        let mut full = mixed.clone();
        for i1 in 0..m {
            let k1 = grid.frequency(i1);
            for j2 in 0..m {
                let twist = -2.0 * std::f64::consts::PI * k1 as f64 * v1[j2] * t;
                full[[i1, j2]] *= Complex64::from_polar(1.0, twist);
            }
        }
        crate::spectral::fft_axis(&mut full, 1, m, true);
        full.mapv_inplace(|c| c / m as f64);
        let field = SpectralField::from_coeffs(grid, full)?;
        norms.push(field.sobolev_norm(spec));
    }
    Ok(norms)
}

/// Velocity sample accessor shared by tests.
pub fn flow_velocity(flow: &FlowSpec, grid: Grid, t: f64) -> Result<VelocitySample> {
    evaluate_flow(flow, grid, t)
}
