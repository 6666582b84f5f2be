//! Run-configuration file format (TOML) and its validation.
//!
//! Parsing reports *every* violation it finds, not just the first, and
//! rejects unknown keys by name so typos surface immediately.

use std::path::PathBuf;

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::evolution::{EquationForm, Method, SolverConfig};
use crate::flow::{FlowSpec, ShearProfile};
use crate::spectral::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Simulate,
    DissipationTime,
    BlowupScan,
    EnhancedDissipationSweep,
    ShearSuppression,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Simulate => "simulate",
            Scenario::DissipationTime => "dissipation-time",
            Scenario::BlowupScan => "blowup-scan",
            Scenario::EnhancedDissipationSweep => "enhanced-dissipation-sweep",
            Scenario::ShearSuppression => "shear-suppression",
        }
    }
}

/// Named initial-data presets.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Zero,
    SingleMode { k: Vec<i64>, amplitude: f64 },
    RandomBand { k_max: usize, amplitude: f64, seed: u64 },
    File { path: PathBuf },
}

#[derive(Debug, Clone)]
pub struct DissipationParams {
    pub truncation: usize,
    pub tolerance: f64,
    /// Start-time samples for time-dependent flows.
    pub start_times: Vec<f64>,
    pub stepping_dt: f64,
}

impl Default for DissipationParams {
    fn default() -> Self {
        Self {
            truncation: 16,
            tolerance: 1e-6,
            start_times: vec![0.0],
            stepping_dt: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ScanParams {
    pub amplitudes: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EnhancedSweepParams {
    pub nu_values: Vec<f64>,
    pub truncation: usize,
}

impl Default for EnhancedSweepParams {
    fn default() -> Self {
        Self {
            nu_values: vec![0.05, 0.02, 0.01, 0.005, 0.002],
            truncation: 16,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuppressionParams {
    /// `<u0>` is scaled to this fraction of the fitted smallness threshold.
    pub threshold_fraction: f64,
    /// Sample count for the empirical `C_p` fit.
    pub cp_samples: usize,
    pub fit_truncation: usize,
    /// Horizon in units of `1/lambda_nu` (t_end = horizon / lambda_nu).
    pub horizon_rate_multiples: f64,
    /// `L^2` norm of the non-sheared part of the initial data.
    pub perp_amplitude: f64,
}

impl Default for SuppressionParams {
    fn default() -> Self {
        Self {
            threshold_fraction: 0.1,
            cp_samples: 200,
            fit_truncation: 16,
            horizon_rate_multiples: 50.0,
            perp_amplitude: 0.5,
        }
    }
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub solver: SolverConfig,
    pub grid: Grid,
    pub initial: InitialData,
    pub output_dir: PathBuf,
    pub sample_every: usize,
    pub checkpoint_every: usize,
    pub seed: u64,
    pub dissipation: DissipationParams,
    pub scan: ScanParams,
    pub enhanced: EnhancedSweepParams,
    pub suppression: SuppressionParams,
    /// Original text, kept for reproducibility hashing.
    pub raw: String,
}

struct Validator {
    errors: Vec<String>,
}

impl Validator {
    fn new() -> Self {
        Self { errors: Vec::new() }
    }

    fn err(&mut self, msg: impl Into<String>) {
        self.errors.push(msg.into());
    }

    fn check_keys(&mut self, table: &Table, context: &str, allowed: &[&str]) {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                self.err(format!("unknown key `{key}` in {context}"));
            }
        }
    }

    fn f64_or(&mut self, table: &Table, key: &str, context: &str, default: f64) -> f64 {
        match table.get(key) {
            None => default,
            Some(Value::Float(f)) => *f,
            Some(Value::Integer(i)) => *i as f64,
            Some(other) => {
                self.err(format!(
                    "key `{key}` in {context} must be a number, got {other}"
                ));
                default
            }
        }
    }

    fn usize_or(&mut self, table: &Table, key: &str, context: &str, default: usize) -> usize {
        match table.get(key) {
            None => default,
            Some(Value::Integer(i)) if *i >= 0 => *i as usize,
            Some(other) => {
                self.err(format!(
                    "key `{key}` in {context} must be a nonnegative integer, got {other}"
                ));
                default
            }
        }
    }

    fn u64_or(&mut self, table: &Table, key: &str, context: &str, default: u64) -> u64 {
        match table.get(key) {
            None => default,
            Some(Value::Integer(i)) if *i >= 0 => *i as u64,
            Some(other) => {
                self.err(format!(
                    "key `{key}` in {context} must be a nonnegative integer, got {other}"
                ));
                default
            }
        }
    }

    fn bool_or(&mut self, table: &Table, key: &str, context: &str, default: bool) -> bool {
        match table.get(key) {
            None => default,
            Some(Value::Boolean(b)) => *b,
            Some(other) => {
                self.err(format!(
                    "key `{key}` in {context} must be a boolean, got {other}"
                ));
                default
            }
        }
    }

    fn str_or<'t>(
        &mut self,
        table: &'t Table,
        key: &str,
        context: &str,
        default: &'t str,
    ) -> &'t str {
        match table.get(key) {
            None => default,
            Some(Value::String(s)) => s,
            Some(other) => {
                self.err(format!(
                    "key `{key}` in {context} must be a string, got {other}"
                ));
                default
            }
        }
    }

    fn f64_list(&mut self, table: &Table, key: &str, context: &str) -> Option<Vec<f64>> {
        match table.get(key) {
            None => None,
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    match item {
                        Value::Float(f) => out.push(*f),
                        Value::Integer(i) => out.push(*i as f64),
                        other => {
                            self.err(format!(
                                "list `{key}` in {context} must hold numbers, got {other}"
                            ));
                        }
                    }
                }
                Some(out)
            }
            Some(other) => {
                self.err(format!(
                    "key `{key}` in {context} must be a list, got {other}"
                ));
                None
            }
        }
    }
}

fn parse_flow(v: &mut Validator, table: &Table, context: &str) -> Option<FlowSpec> {
    v.check_keys(
        table,
        context,
        &[
            "variant",
            "amplitude",
            "cell_scale",
            "profile",
            "critical_order",
            "samples",
            "base",
        ],
    );
    let variant = v.str_or(table, "variant", context, "");
    match variant {
        "zero" => Some(FlowSpec::Zero),
        "shear" => {
            let amplitude = v.f64_or(table, "amplitude", context, 1.0);
            let critical_order = v.usize_or(table, "critical_order", context, 2);
            let profile = match v.str_or(table, "profile", context, "sin") {
                "sin" => ShearProfile::Sin { amplitude },
                "samples" => match v.f64_list(table, "samples", context) {
                    Some(samples) if !samples.is_empty() => ShearProfile::Samples(samples),
                    _ => {
                        v.err(format!(
                            "shear flow with profile = \"samples\" needs a nonempty `samples` list in {context}"
                        ));
                        return None;
                    }
                },
                other => {
                    v.err(format!(
                        "unknown shear profile `{other}` in {context} (expected \"sin\" or \"samples\")"
                    ));
                    return None;
                }
            };
            Some(FlowSpec::Shear {
                profile,
                critical_order,
            })
        }
        "cellular" => {
            let amplitude = v.f64_or(table, "amplitude", context, 1.0);
            let cell_scale = v.f64_or(table, "cell_scale", context, 1.0);
            if cell_scale <= 0.0 || (1.0 / cell_scale - (1.0 / cell_scale).round()).abs() > 1e-9 {
                v.err(format!(
                    "cellular cell_scale in {context} must be the reciprocal of a positive integer, got {cell_scale}"
                ));
            }
            Some(FlowSpec::Cellular {
                amplitude,
                cell_scale,
            })
        }
        "rescaled-mixing" => {
            let amplitude = v.f64_or(table, "amplitude", context, 1.0);
            let base = match table.get("base") {
                Some(Value::Table(base_table)) => {
                    parse_flow(v, base_table, &format!("{context}.base"))?
                }
                _ => {
                    v.err(format!(
                        "rescaled-mixing flow needs a `base` table in {context}"
                    ));
                    return None;
                }
            };
            Some(FlowSpec::RescaledMixing {
                base: Box::new(base),
                amplitude,
            })
        }
        "" => {
            v.err(format!("missing `variant` in {context}"));
            None
        }
        other => {
            v.err(format!(
                "unknown flow variant `{other}` in {context} (expected zero, shear, cellular or rescaled-mixing)"
            ));
            None
        }
    }
}

fn parse_initial(v: &mut Validator, table: &Table) -> InitialData {
    let context = "[initial]";
    v.check_keys(
        table,
        context,
        &["preset", "k", "amplitude", "k_max", "seed", "path"],
    );
    match v.str_or(table, "preset", context, "zero") {
        "zero" => InitialData::Zero,
        "single_mode" => {
            let k = match table.get("k") {
                Some(Value::Array(items)) => items
                    .iter()
                    .filter_map(|x| match x {
                        Value::Integer(i) => Some(*i),
                        _ => None,
                    })
                    .collect(),
                _ => vec![1, 0],
            };
            InitialData::SingleMode {
                k,
                amplitude: v.f64_or(table, "amplitude", context, 1.0),
            }
        }
        "random_band" => InitialData::RandomBand {
            k_max: v.usize_or(table, "k_max", context, 3),
            amplitude: v.f64_or(table, "amplitude", context, 1.0),
            seed: v.u64_or(table, "seed", context, 0),
        },
        "file" => {
            let path = v.str_or(table, "path", context, "");
            if path.is_empty() {
                v.err("initial preset \"file\" needs a `path`".to_string());
            }
            InitialData::File {
                path: PathBuf::from(path),
            }
        }
        other => {
            v.err(format!(
                "unknown initial preset `{other}` (expected zero, single_mode, random_band or file)"
            ));
            InitialData::Zero
        }
    }
}

/// Parse and validate a configuration document, reporting all violations.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let table: Table = text
        .parse()
        .map_err(|e| Error::Config(vec![format!("TOML syntax: {e}")]))?;
    let mut v = Validator::new();

    v.check_keys(
        &table,
        "the top level",
        &[
            "scenario",
            "seed",
            "output_dir",
            "sample_every",
            "checkpoint_every",
            "solver",
            "flow",
            "initial",
            "dissipation",
            "scan",
            "enhanced",
            "suppression",
        ],
    );

    let scenario = match v.str_or(&table, "scenario", "the top level", "") {
        "simulate" => Scenario::Simulate,
        "dissipation-time" => Scenario::DissipationTime,
        "blowup-scan" => Scenario::BlowupScan,
        "enhanced-dissipation-sweep" => Scenario::EnhancedDissipationSweep,
        "shear-suppression" => Scenario::ShearSuppression,
        "" => {
            v.err("missing `scenario`".to_string());
            Scenario::Simulate
        }
        other => {
            v.err(format!(
                "unknown scenario `{other}` (expected simulate, dissipation-time, blowup-scan, enhanced-dissipation-sweep or shear-suppression)"
            ));
            Scenario::Simulate
        }
    };

    let empty = Table::new();
    let solver_table = match table.get("solver") {
        Some(Value::Table(t)) => t,
        Some(other) => {
            v.err(format!("`solver` must be a table, got {other}"));
            &empty
        }
        None => &empty,
    };
    v.check_keys(
        solver_table,
        "[solver]",
        &[
            "nu",
            "p",
            "dt",
            "t_end",
            "grid_dim",
            "grid_points",
            "dealias_fraction",
            "blowup_threshold",
            "enforce_mean_zero",
            "form",
            "method",
            "disable_nonlinearity",
        ],
    );

    let grid_dim = v.usize_or(solver_table, "grid_dim", "[solver]", 2);
    let grid_points = v.usize_or(solver_table, "grid_points", "[solver]", 64);
    let grid = match Grid::new(grid_dim, grid_points) {
        Ok(g) => Some(g),
        Err(e) => {
            v.err(format!("[solver] grid: {e}"));
            None
        }
    };

    let p = v.f64_or(solver_table, "p", "[solver]", 1.5);
    if let Some(g) = &grid {
        let p_max = 1.0 + 2.0 / g.dim() as f64;
        if !(1.0..p_max).contains(&p) {
            v.err(format!(
                "[solver] p = {p} violates the constraint 1 <= p < 1 + 2/N = {p_max} for N = {}",
                g.dim()
            ));
        }
    }

    let dt = v.f64_or(solver_table, "dt", "[solver]", 1e-3);
    if dt <= 0.0 {
        v.err(format!("[solver] dt must be positive, got {dt}"));
    }
    let nu = v.f64_or(solver_table, "nu", "[solver]", 1.0);
    if nu <= 0.0 {
        v.err(format!("[solver] nu must be positive, got {nu}"));
    }

    let form = match v.str_or(solver_table, "form", "[solver]", "standard") {
        "standard" => EquationForm::Standard,
        "rescaled-shear" => EquationForm::RescaledShear,
        other => {
            v.err(format!(
                "unknown equation form `{other}` (expected standard or rescaled-shear)"
            ));
            EquationForm::Standard
        }
    };
    let method = match v.str_or(solver_table, "method", "[solver]", "etd1") {
        "etd1" => Method::Etd1,
        "etdrk2" => Method::Etdrk2,
        other => {
            v.err(format!("unknown method `{other}` (expected etd1 or etdrk2)"));
            Method::Etd1
        }
    };

    let flow = match table.get("flow") {
        Some(Value::Table(t)) => parse_flow(&mut v, t, "[flow]"),
        Some(other) => {
            v.err(format!("`flow` must be a table, got {other}"));
            None
        }
        None => {
            if matches!(
                scenario,
                Scenario::ShearSuppression | Scenario::EnhancedDissipationSweep
            ) {
                v.err(format!(
                    "scenario {} requires a [flow] table",
                    scenario.as_str()
                ));
                None
            } else {
                Some(FlowSpec::Zero)
            }
        }
    };
    if matches!(
        scenario,
        Scenario::ShearSuppression | Scenario::EnhancedDissipationSweep
    ) && !matches!(flow, Some(FlowSpec::Shear { .. }))
    {
        v.err(format!(
            "scenario {} requires a shear flow",
            scenario.as_str()
        ));
    }

    let solver = SolverConfig {
        nu,
        p,
        dt,
        t_end: v.f64_or(solver_table, "t_end", "[solver]", 1.0),
        flow: flow.clone().unwrap_or(FlowSpec::Zero),
        dealias_fraction: v.f64_or(solver_table, "dealias_fraction", "[solver]", 2.0 / 3.0),
        blowup_threshold: v.f64_or(solver_table, "blowup_threshold", "[solver]", 1e6),
        enforce_mean_zero: v.bool_or(solver_table, "enforce_mean_zero", "[solver]", true),
        form,
        method,
        nonlinearity_enabled: !v.bool_or(solver_table, "disable_nonlinearity", "[solver]", false),
    };

    let initial = match table.get("initial") {
        Some(Value::Table(t)) => parse_initial(&mut v, t),
        Some(other) => {
            v.err(format!("`initial` must be a table, got {other}"));
            InitialData::Zero
        }
        None => InitialData::Zero,
    };

    let mut dissipation = DissipationParams::default();
    if let Some(Value::Table(t)) = table.get("dissipation") {
        v.check_keys(
            t,
            "[dissipation]",
            &["truncation", "tolerance", "start_times", "stepping_dt"],
        );
        dissipation.truncation = v.usize_or(t, "truncation", "[dissipation]", 16);
        dissipation.tolerance = v.f64_or(t, "tolerance", "[dissipation]", 1e-6);
        dissipation.stepping_dt = v.f64_or(t, "stepping_dt", "[dissipation]", 1e-4);
        if let Some(starts) = v.f64_list(t, "start_times", "[dissipation]") {
            if !starts.is_empty() {
                dissipation.start_times = starts;
            }
        }
    }

    let mut scan = ScanParams::default();
    if let Some(Value::Table(t)) = table.get("scan") {
        v.check_keys(t, "[scan]", &["amplitudes"]);
        if let Some(a) = v.f64_list(t, "amplitudes", "[scan]") {
            scan.amplitudes = a;
        }
    }
    if scenario == Scenario::BlowupScan && scan.amplitudes.is_empty() {
        v.err("scenario blowup-scan requires [scan] amplitudes".to_string());
    }

    let mut enhanced = EnhancedSweepParams::default();
    if let Some(Value::Table(t)) = table.get("enhanced") {
        v.check_keys(t, "[enhanced]", &["nu_values", "truncation"]);
        if let Some(nus) = v.f64_list(t, "nu_values", "[enhanced]") {
            enhanced.nu_values = nus;
        }
        enhanced.truncation = v.usize_or(t, "truncation", "[enhanced]", 16);
    }

    let mut suppression = SuppressionParams::default();
    if let Some(Value::Table(t)) = table.get("suppression") {
        v.check_keys(
            t,
            "[suppression]",
            &[
                "threshold_fraction",
                "cp_samples",
                "fit_truncation",
                "horizon_rate_multiples",
                "perp_amplitude",
            ],
        );
        suppression.threshold_fraction =
            v.f64_or(t, "threshold_fraction", "[suppression]", 0.1);
        suppression.cp_samples = v.usize_or(t, "cp_samples", "[suppression]", 200);
        suppression.fit_truncation = v.usize_or(t, "fit_truncation", "[suppression]", 16);
        suppression.horizon_rate_multiples =
            v.f64_or(t, "horizon_rate_multiples", "[suppression]", 50.0);
        suppression.perp_amplitude = v.f64_or(t, "perp_amplitude", "[suppression]", 0.5);
    }

    let output_dir = PathBuf::from(v.str_or(&table, "output_dir", "the top level", "out"));
    let sample_every = v.usize_or(&table, "sample_every", "the top level", 1).max(1);
    let checkpoint_every = v.usize_or(&table, "checkpoint_every", "the top level", 0);
    let seed = v.u64_or(&table, "seed", "the top level", 0);

    if !v.errors.is_empty() {
        return Err(Error::Config(v.errors));
    }
    Ok(RunConfig {
        scenario,
        solver,
        grid: grid.expect("validated"),
        initial,
        output_dir,
        sample_every,
        checkpoint_every,
        seed,
        dissipation,
        scan,
        enhanced,
        suppression,
        raw: text.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_simulate_config_gets_defaults() {
        let cfg = parse_config("scenario = \"simulate\"\n").unwrap();
        assert_eq!(cfg.scenario, Scenario::Simulate);
        assert_eq!(cfg.grid.points_per_axis(), 64);
        assert_eq!(cfg.solver.p, 1.5);
        assert_eq!(cfg.initial, InitialData::Zero);
        assert_eq!(cfg.sample_every, 1);
    }

    #[test]
    fn fujita_bound_violation_cites_the_constraint() {
        let err = parse_config(
            "scenario = \"simulate\"\n[solver]\np = 2.5\ngrid_dim = 2\n",
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("1 + 2/N = 2"), "message: {msg}");
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = parse_config(
            "scenario = \"simulate\"\nbogus_key = 1\n[solver]\nwhatever = 2\n",
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus_key"), "message: {msg}");
        assert!(msg.contains("whatever"), "message: {msg}");
    }

    #[test]
    fn all_violations_are_collected() {
        let err = parse_config(
            "scenario = \"nope\"\n[solver]\np = 9.0\ndt = -1.0\nnu = 0.0\n",
        )
        .unwrap_err();
        match err {
            Error::Config(list) => {
                assert!(list.len() >= 4, "violations: {list:?}");
            }
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn shear_suppression_requires_shear_flow() {
        let err =
            parse_config("scenario = \"shear-suppression\"\n").unwrap_err();
        assert!(err.to_string().contains("requires"), "{err}");
        let err2 = parse_config(
            "scenario = \"shear-suppression\"\n[flow]\nvariant = \"cellular\"\n",
        )
        .unwrap_err();
        assert!(err2.to_string().contains("shear"), "{err2}");
        let ok = parse_config(
            "scenario = \"shear-suppression\"\n[solver]\nform = \"rescaled-shear\"\nnu = 0.01\n[flow]\nvariant = \"shear\"\n",
        );
        assert!(ok.is_ok(), "{ok:?}");
    }

    #[test]
    fn blowup_scan_requires_amplitudes() {
        assert!(parse_config("scenario = \"blowup-scan\"\n").is_err());
        let ok = parse_config(
            "scenario = \"blowup-scan\"\n[scan]\namplitudes = [1.0, 2.0]\n",
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn flow_variants_round_trip() {
        let cfg = parse_config(
            r#"
scenario = "simulate"
[flow]
variant = "rescaled-mixing"
amplitude = 4.0
[flow.base]
variant = "cellular"
amplitude = 1.0
cell_scale = 0.5
"#,
        )
        .unwrap();
        match cfg.solver.flow {
            FlowSpec::RescaledMixing { amplitude, ref base } => {
                assert_eq!(amplitude, 4.0);
                assert!(matches!(**base, FlowSpec::Cellular { .. }));
            }
            ref other => panic!("unexpected flow {other:?}"),
        }
    }

    #[test]
    fn initial_presets_parse() {
        let cfg = parse_config(
            "scenario = \"simulate\"\n[initial]\npreset = \"single_mode\"\nk = [1, 0]\namplitude = 2.0\n",
        )
        .unwrap();
        assert_eq!(
            cfg.initial,
            InitialData::SingleMode {
                k: vec![1, 0],
                amplitude: 2.0
            }
        );
        let cfg2 = parse_config(
            "scenario = \"simulate\"\n[initial]\npreset = \"random_band\"\nk_max = 5\nseed = 9\n",
        )
        .unwrap();
        assert!(matches!(cfg2.initial, InitialData::RandomBand { k_max: 5, seed: 9, .. }));
    }
}
