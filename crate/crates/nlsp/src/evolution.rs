//! Time integration of
//!
//! ```text
//! u_t + v . grad u - nu Delta u = s(nu) * ( |u|^p - integral |u|^p )
//! ```
//!
//! in the Duhamel (mild-solution) form. The stepper is an exponential
//! integrator: the diffusion semigroup is applied exactly as a Fourier
//! multiplier and the forcing enters through the phi_1 / phi_2 multipliers,
//! so a single step is literally the discretized variation-of-constants
//! formula. ETD1 is the default, with a two-stage ETDRK2 corrector option.
//!
//! Two scalings of the same family are supported: the standard form
//! (`s = 1`, flow amplitude carried by `v`, usually `nu = 1`) and the
//! rescaled shear form (`s = nu`, unit-amplitude shear, `nu = 1/A`).

use ndarray::ArrayD;
use num_complex::Complex64;

use crate::diagnostics::{self, TrajectoryRecord, TrajectorySample};
use crate::error::{Error, Result};
use crate::flow::{evaluate_flow, FlowSpec, VelocitySample};
use crate::spectral::{Grid, SpectralField, LAMBDA_1};

/// Which scaling of the equation family is being integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationForm {
    /// `u_t + v.grad u - nu Delta u = N(u)`
    Standard,
    /// `u_t + v.grad u - nu Delta u = nu N(u)` (shear form, `nu = 1/A`)
    RescaledShear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Etd1,
    Etdrk2,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub nu: f64,
    pub p: f64,
    pub dt: f64,
    pub t_end: f64,
    pub flow: FlowSpec,
    pub dealias_fraction: f64,
    pub blowup_threshold: f64,
    pub enforce_mean_zero: bool,
    pub form: EquationForm,
    pub method: Method,
    /// Gate for the nonlinear term; linear advection-diffusion runs switch
    /// it off.
    pub nonlinearity_enabled: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            nu: 1.0,
            p: 1.5,
            dt: 1e-3,
            t_end: 1.0,
            flow: FlowSpec::Zero,
            dealias_fraction: 2.0 / 3.0,
            blowup_threshold: 1e6,
            enforce_mean_zero: true,
            form: EquationForm::Standard,
            method: Method::Etd1,
            nonlinearity_enabled: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let p_max = 1.0 + 2.0 / grid.dim() as f64;
        if !(self.p >= 1.0 && self.p < p_max) {
            return Err(Error::InvalidParameter(format!(
                "p = {} violates 1 <= p < 1 + 2/N = {} for N = {}",
                self.p,
                p_max,
                grid.dim()
            )));
        }
        if self.dt <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.nu <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "nu must be positive, got {}",
                self.nu
            )));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "dealias fraction must lie in (0, 1], got {}",
                self.dealias_fraction
            )));
        }
        Ok(())
    }

    /// Coefficient in front of the nonlocal nonlinearity.
    pub fn nonlinearity_scale(&self) -> f64 {
        match self.form {
            EquationForm::Standard => 1.0,
            EquationForm::RescaledShear => self.nu,
        }
    }
}

/// Terminal state of an integration.
#[derive(Debug, Clone, PartialEq)]
pub enum EvolutionStatus {
    Completed,
    BlowUp { t_detect: f64, norm: f64 },
    StepCollapse { t: f64 },
}

/// `|u|^p - integral |u|^p`, evaluated pointwise in physical space,
/// transformed back, mean-projected and dealiased.
pub fn nonlocal_nonlinearity(
    u: &SpectralField,
    p: f64,
    dealias_fraction: f64,
) -> Result<SpectralField> {
    if p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "nonlinearity exponent must satisfy p >= 1, got {p}"
        )));
    }
    let samples = u.to_samples();
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite samples in |u|^p".into()));
    }
    let powed = samples.mapv(|v| v.abs().powf(p));
    let field = SpectralField::from_samples(u.grid(), &powed)?;
    Ok(field.project_mean_zero().dealias(dealias_fraction))
}

/// Pseudo-spectral `v . grad u` with dealiasing.
pub fn advection_term(
    u: &SpectralField,
    velocity: &VelocitySample,
    dealias_fraction: f64,
) -> Result<SpectralField> {
    let grid = u.grid();
    if velocity.components.len() != grid.dim()
        || velocity.components[0].shape() != grid.shape().as_slice()
    {
        return Err(Error::DimensionMismatch {
            expected: format!("{} velocity components on {:?}", grid.dim(), grid.shape()),
            got: format!("{} components", velocity.components.len()),
        });
    }
    let grads = u.gradient();
    let mut acc: Option<ArrayD<f64>> = None;
    for (vj, gj) in velocity.components.iter().zip(&grads) {
        let term = vj * &gj.to_samples();
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    let field = SpectralField::from_samples(grid, &acc.expect("dim >= 1"))?;
    Ok(field.dealias(dealias_fraction))
}

/// Convenience wrapper that evaluates the flow first.
pub fn advection_term_for_flow(
    u: &SpectralField,
    flow: &FlowSpec,
    t: f64,
    dealias_fraction: f64,
) -> Result<SpectralField> {
    let velocity = evaluate_flow(flow, u.grid(), t)?;
    advection_term(u, &velocity, dealias_fraction)
}

/// `phi_1(z) = (e^z - 1)/z`, Taylor branch below |z| = 1e-4.
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `phi_2(z) = (e^z - 1 - z)/z^2`, Taylor branch below |z| = 1e-4.
fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

/// One-step exponential integrator with cached multiplier tables and cached
/// velocity samples for steady flows.
pub struct Stepper {
    config: SolverConfig,
    grid: Grid,
    dt: f64,
    exp_table: ArrayD<f64>,
    phi1_table: ArrayD<f64>,
    phi2_table: ArrayD<f64>,
    steady_velocity: Option<VelocitySample>,
}

impl Stepper {
    pub fn new(grid: Grid, config: SolverConfig) -> Result<Self> {
        config.validate(&grid)?;
        let steady_velocity = if config.flow.is_time_dependent() {
            None
        } else {
            Some(evaluate_flow(&config.flow, grid, 0.0)?)
        };
        let dt = config.dt;
        let mut stepper = Self {
            config,
            grid,
            dt,
            exp_table: ArrayD::zeros(ndarray::IxDyn(&grid.shape())),
            phi1_table: ArrayD::zeros(ndarray::IxDyn(&grid.shape())),
            phi2_table: ArrayD::zeros(ndarray::IxDyn(&grid.shape())),
            steady_velocity,
        };
        stepper.rebuild_tables();
        Ok(stepper)
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn set_dt(&mut self, dt: f64) {
        if dt != self.dt {
            self.dt = dt;
            self.rebuild_tables();
        }
    }

    fn rebuild_tables(&mut self) {
        let grid = self.grid;
        let nu = self.config.nu;
        let dt = self.dt;
        let fill = |table: &mut ArrayD<f64>, f: &dyn Fn(f64) -> f64| {
            for (idx, v) in table.indexed_iter_mut() {
                use ndarray::Dimension;
                let k2: f64 = idx
                    .slice()
                    .iter()
                    .map(|&i| {
                        let k = grid.frequency(i);
                        (k * k) as f64
                    })
                    .sum();
                let z = -nu * LAMBDA_1 * k2 * dt;
                *v = f(z);
            }
        };
        fill(&mut self.exp_table, &|z| z.exp());
        fill(&mut self.phi1_table, &phi1);
        fill(&mut self.phi2_table, &phi2);
    }

    fn velocity_at(&self, t: f64) -> Result<VelocitySample> {
        match &self.steady_velocity {
            Some(v) => Ok(v.clone()),
            None => evaluate_flow(&self.config.flow, self.grid, t),
        }
    }

    /// Forcing `F(u, t) = s(nu) N(u) - v . grad u` in coefficient space.
    fn forcing(&self, u: &SpectralField, t: f64) -> Result<SpectralField> {
        let frac = self.config.dealias_fraction;
        let mut force = if self.config.nonlinearity_enabled {
            nonlocal_nonlinearity(u, self.config.p, frac)?
                .scale(self.config.nonlinearity_scale())
        } else {
            SpectralField::zero(self.grid)
        };
        let velocity = self.velocity_at(t)?;
        let adv = advection_term(u, &velocity, frac)?;
        force = force.lin_comb(1.0, &adv, -1.0)?;
        Ok(force)
    }

    fn multiply_tables(
        &self,
        u: &SpectralField,
        table: &ArrayD<f64>,
    ) -> SpectralField {
        let coeffs = u.coeffs() * &table.mapv(|v| Complex64::new(v, 0.0));
        SpectralField::from_coeffs(self.grid, coeffs).expect("shape preserved")
    }

    /// One exponential-Euler (or ETDRK2) step of the Duhamel form.
    pub fn step(&self, u: &SpectralField, t: f64) -> Result<SpectralField> {
        let dt = self.dt;
        let f0 = self.forcing(u, t)?;
        let propagated = self.multiply_tables(u, &self.exp_table);
        let increment = self.multiply_tables(&f0, &self.phi1_table).scale(dt);
        let predictor = propagated.lin_comb(1.0, &increment, 1.0)?;
        let mut next = match self.config.method {
            Method::Etd1 => predictor,
            Method::Etdrk2 => {
                let f1 = self.forcing(&predictor, t + dt)?;
                let delta = f1.lin_comb(1.0, &f0, -1.0)?;
                let corr = self.multiply_tables(&delta, &self.phi2_table).scale(dt);
                predictor.lin_comb(1.0, &corr, 1.0)?
            }
        };
        if self.config.enforce_mean_zero {
            next = next.project_mean_zero();
        }
        if !next.is_finite() {
            return Err(Error::Numerical("non-finite step result".into()));
        }
        Ok(next)
    }
}

/// Single-step convenience used by tests and the basis propagation code.
pub fn step(u: &SpectralField, t: f64, config: &SolverConfig) -> Result<SpectralField> {
    Stepper::new(u.grid(), config.clone())?.step(u, t)
}

const MAX_DT_HALVINGS: u32 = 20;
const GROWTH_GUARD_FACTOR: f64 = 10.0;

/// Integrate from `u0` until `t_end`, a blow-up detection or a step
/// collapse, sampling diagnostics every `sample_every` steps.
///
/// The blow-up proxy is an `L^2` threshold of
/// `config.blowup_threshold * (1 + ||u0||)`. A growth guard halves `dt`
/// (up to 20 times) whenever one step multiplies the norm by more than 10;
/// genuine blow-up then crosses the threshold within a few steps at the
/// floor step size.
pub fn integrate(
    u0: &SpectralField,
    config: &SolverConfig,
    sample_every: usize,
) -> Result<(TrajectoryRecord, EvolutionStatus)> {
    integrate_with(u0, 0.0, config, sample_every, |_, _, _| Ok(()))
}

/// [`integrate`] with a start time offset and a per-step hook (used by the
/// scenario runner for checkpoint emission). The hook receives the step
/// count, the new time and the new state after every accepted step.
pub fn integrate_with(
    u0: &SpectralField,
    t0: f64,
    config: &SolverConfig,
    sample_every: usize,
    mut on_step: impl FnMut(u64, f64, &SpectralField) -> Result<()>,
) -> Result<(TrajectoryRecord, EvolutionStatus)> {
    let grid = u0.grid();
    let mut stepper = Stepper::new(grid, config.clone())?;
    let sample_every = sample_every.max(1);

    let mut u = if config.enforce_mean_zero {
        u0.project_mean_zero()
    } else {
        u0.clone()
    };
    // keep the state inside the dealiased band from the start
    u = u.dealias(config.dealias_fraction);

    let u0_l2 = u.l2_norm();
    let threshold = config.blowup_threshold * (1.0 + u0_l2);

    let mut record = TrajectoryRecord {
        config_hash: config_hash(config),
        ..Default::default()
    };

    let mut t = t0;
    let mut halvings = 0u32;
    let mut grad_sq_prev = u.h1_seminorm().powi(2);
    let mut pump_prev = diagnostics::pump_term(&u, config.p);
    let mut perp_grad_prev = diagnostics::perp_gradient_sq(&u);
    let mut grad_int = 0.0;
    let mut pump_int = 0.0;
    let mut perp_grad_int = 0.0;
    let u0_sq = u0_l2 * u0_l2;

    let sample_of = |t: f64,
                     u: &SpectralField,
                     grad_int: f64,
                     pump_int: f64|
     -> TrajectorySample {
        let (mean_n, perp_n) = diagnostics::shear_split_norms(u);
        let l2 = u.l2_norm();
        TrajectorySample {
            t,
            l2_norm: l2,
            h1_seminorm: u.h1_seminorm(),
            l2_mean_x1: mean_n,
            l2_perp: perp_n,
            blowup_energy: diagnostics::blowup_energy(u, config.p),
            energy_residual: (l2 * l2 + 2.0 * grad_int - u0_sq - 2.0 * pump_int).abs(),
        }
    };

    record
        .push_first(sample_of(t, &u, 0.0, 0.0), 0.0)
        .expect("first sample");

    let mut status = EvolutionStatus::Completed;
    let mut steps: u64 = 0;
    while t < config.t_end - 1e-12 * config.t_end.max(1.0) {
        let dt = stepper.dt().min(config.t_end - t);
        let dt_mismatch = dt != stepper.dt();
        if dt_mismatch {
            stepper.set_dt(dt);
        }

        let next = match stepper.step(&u, t) {
            Ok(v) => v,
            Err(Error::Numerical(_)) => {
                status = EvolutionStatus::StepCollapse { t };
                break;
            }
            Err(e) => return Err(e),
        };
        let next_norm = next.l2_norm();
        let cur_norm = u.l2_norm();

        if next_norm > GROWTH_GUARD_FACTOR * cur_norm && halvings < MAX_DT_HALVINGS {
            halvings += 1;
            stepper.set_dt(stepper.dt() / 2.0);
            continue; // retry the step from the same state
        }

        u = next;
        t += dt;
        steps += 1;
        on_step(steps, t, &u)?;

        let grad_sq = u.h1_seminorm().powi(2);
        let pump = diagnostics::pump_term(&u, config.p);
        let perp_grad = diagnostics::perp_gradient_sq(&u);
        grad_int += 0.5 * (grad_sq + grad_sq_prev) * dt;
        pump_int += 0.5 * (pump + pump_prev) * dt;
        perp_grad_int += 0.5 * (perp_grad + perp_grad_prev) * dt;
        grad_sq_prev = grad_sq;
        pump_prev = pump;
        perp_grad_prev = perp_grad;

        let done = t >= config.t_end - 1e-12 * config.t_end.max(1.0);
        if steps % sample_every as u64 == 0 || done || next_norm >= threshold {
            record.push(sample_of(t, &u, grad_int, pump_int), perp_grad_int)?;
        }

        if next_norm >= threshold {
            status = EvolutionStatus::BlowUp {
                t_detect: t,
                norm: next_norm,
            };
            break;
        }
        if !next_norm.is_finite() {
            status = EvolutionStatus::StepCollapse { t };
            break;
        }
    }

    Ok((record, status))
}

fn config_hash(config: &SolverConfig) -> u64 {
    fnv1a(format!("{config:?}").as_bytes())
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

impl TrajectoryRecord {
    /// First row may sit at `t = 0`, which `push` would reject later.
    fn push_first(&mut self, s: TrajectorySample, g: f64) -> Result<()> {
        if !self.samples.is_empty() {
            return Err(Error::InvalidParameter("record not empty".into()));
        }
        self.samples.push(s);
        self.perp_gradient_integral.push(g);
        Ok(())
    }
}

/// `X_T` norm of a sampled trajectory:
/// `max( sup_t ||u||_{L^2}, sup_{t>0} t^{1/2} ||grad u||_{L^2} )`.
pub fn xt_norm(traj: &[(f64, SpectralField)]) -> Result<f64> {
    if traj.is_empty() {
        return Err(Error::InvalidParameter("empty trajectory".into()));
    }
    let mut worst = 0.0f64;
    for (t, u) in traj {
        worst = worst.max(u.l2_norm());
        if *t > 0.0 {
            worst = worst.max(t.sqrt() * u.h1_seminorm());
        }
    }
    Ok(worst)
}
