//! JSON scenarios: a system, a signal and a list of analyses, run in order with one
//! JSON report (and CSV table where it makes sense) per analysis.
//!
//! ```json
//! {
//!   "seed": 7,
//!   "system": { "kind": "wave-modal", "n_modes": 1, "uniform": 1.0 },
//!   "signal": { "kind": "periodic-gate", "period": 2.0, "halfwidth": 0.5 },
//!   "horizon": 20.0,
//!   "dt_out": 0.01,
//!   "analyses": [ { "kind": "simulate" }, { "kind": "check-pe", "T": 2.0, "mu": 0.5 } ]
//! }
//! ```
//!
//! CSV headers:
//!
//! | analysis           | header                                               |
//! |--------------------|------------------------------------------------------|
//! | `simulate`         | `t,V,damping_rate` (plus `z0,z1,..` with `with_state`) |
//! | `kappa-scan`       | `T,c`                                                |
//! | `certify`          | `trial,pe_ok,margin,worst_time`                      |
//! | `strong-stability` | `n,factor,cumulative_bound,measured_ratio`           |
//! | `window-scan`      | `n_modes,free_value,interval_value`                  |

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::dalembert;
use crate::error::Error;
use crate::linsys::LinearSystem;
use crate::modal::{self, SchrodingerModalSpec, WaveDamping, WaveModalSpec};
use crate::observability::{self, OuterSearch, SignalClass};
use crate::signals::{IntervalSequence, Signal};
use crate::stability::{self, CostSource, PeFamily, TabulatedCost};
use crate::VERSION;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PEXSTAB_OUT";

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub kind: SystemKind,
    #[serde(default, rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    #[serde(default, rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_modes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    Matrices,
    WaveModal,
    SchrodingerModal,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SignalSpec {
    Literal {
        #[serde(default)]
        breakpoints: Vec<f64>,
        #[serde(default)]
        values: Vec<f64>,
        tail: f64,
    },
    Constant {
        level: f64,
    },
    PeriodicGate {
        period: f64,
        halfwidth: f64,
        /// Defaults to the scenario horizon.
        #[serde(default)]
        horizon: Option<f64>,
    },
    Intervals {
        intervals: Vec<(f64, f64)>,
        #[serde(default = "one")]
        level: f64,
    },
    HarauxGap {
        n_max: usize,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConstantSpec {
    Explicit {
        c: f64,
    },
    WavePeBound {
        lambda_min: f64,
        #[serde(default = "one")]
        d0: f64,
    },
    Numerical {
        n_cells: usize,
        #[serde(default)]
        outer: Option<OuterSearch>,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Analysis {
    Simulate {
        #[serde(default)]
        with_state: bool,
    },
    CheckPe {
        #[serde(rename = "T")]
        t: f64,
        mu: f64,
        /// Expected outcome; a mismatch is a verification failure.
        #[serde(default = "yes")]
        expect: bool,
    },
    Counterexample {
        omega: (f64, f64),
        #[serde(default = "three")]
        periods: usize,
    },
    Observability {
        class: SignalClass,
        n_cells: usize,
        #[serde(default)]
        outer: Option<OuterSearch>,
    },
    KappaScan {
        rho: f64,
        #[serde(rename = "T_grid")]
        t_grid: Vec<f64>,
        n_cells: usize,
        #[serde(default)]
        outer: Option<OuterSearch>,
        #[serde(default)]
        slope_range: Option<(f64, f64)>,
    },
    Certify {
        #[serde(rename = "T")]
        t: f64,
        mu: f64,
        constant: ConstantSpec,
        #[serde(default)]
        theta: Option<f64>,
        #[serde(default = "twenty")]
        trials: usize,
        #[serde(default)]
        horizon: Option<f64>,
        #[serde(default)]
        dt_out: Option<f64>,
    },
    StrongStability {
        intervals: Vec<(f64, f64)>,
        #[serde(default = "one")]
        rho: f64,
        #[serde(default = "signal_gramian")]
        costs: CostSource,
        #[serde(default)]
        explicit_costs: Option<Vec<f64>>,
        #[serde(default, rename = "T0")]
        t0: Option<f64>,
        #[serde(default, rename = "c_of_T")]
        c_of_t: Option<Vec<(f64, f64)>>,
    },
    WindowScan {
        omega: (f64, f64),
        max_modes: usize,
        #[serde(rename = "T")]
        t: f64,
        mu: f64,
        n_cells: usize,
        #[serde(default)]
        outer: Option<OuterSearch>,
    },
}

fn yes() -> bool {
    true
}
fn three() -> usize {
    3
}
fn twenty() -> usize {
    20
}
fn signal_gramian() -> CostSource {
    CostSource::SignalGramian
}

impl Analysis {
    pub fn kind(&self) -> &'static str {
        match self {
            Analysis::Simulate { .. } => "simulate",
            Analysis::CheckPe { .. } => "check-pe",
            Analysis::Counterexample { .. } => "counterexample",
            Analysis::Observability { .. } => "observability",
            Analysis::KappaScan { .. } => "kappa-scan",
            Analysis::Certify { .. } => "certify",
            Analysis::StrongStability { .. } => "strong-stability",
            Analysis::WindowScan { .. } => "window-scan",
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub signal: Option<SignalSpec>,
    #[serde(default = "ten")]
    pub horizon: f64,
    #[serde(default = "dt_default")]
    pub dt_out: f64,
    #[serde(default)]
    pub z0: Option<Vec<f64>>,
    pub analyses: Vec<Analysis>,
}

fn ten() -> f64 {
    10.0
}
fn dt_default() -> f64 {
    1e-2
}

#[derive(Debug)]
pub enum ScenarioError {
    /// Schema or precondition violation at a JSON pointer.
    Schema {
        pointer: String,
        message: String,
    },
    Io(String),
    /// A library error raised while running an analysis that is not a precondition violation.
    Runtime {
        pointer: String,
        error: Error,
    },
}

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScenarioError::Schema { pointer, message } => {
                write!(f, "schema violation at {pointer}: {message}")
            }
            ScenarioError::Io(m) => write!(f, "I/O failure: {m}"),
            ScenarioError::Runtime { pointer, error } => {
                write!(f, "analysis {pointer} failed: {error}")
            }
        }
    }
}

impl std::error::Error for ScenarioError {}

impl ScenarioError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Schema { .. } => 2,
            ScenarioError::Io(_) => 3,
            ScenarioError::Runtime { .. } => 1,
        }
    }
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema {
        pointer: pointer.into(),
        message: message.into(),
    }
}

/// Library errors that reflect bad input are reported as schema violations.
fn classify(pointer: String, error: Error) -> ScenarioError {
    match error {
        Error::NonFinite { .. } | Error::Unbounded => ScenarioError::Runtime { pointer, error },
        Error::Infeasible(ref m) if m.contains("pivot limit") => {
            ScenarioError::Runtime { pointer, error }
        }
        other => ScenarioError::Schema {
            pointer,
            message: other.to_string(),
        },
    }
}

/// Converts a serde path (`analyses[1].mu`) to a JSON pointer (`/analyses/1/mu`).
fn to_pointer(path: &str) -> String {
    if path == "." || path.is_empty() {
        return "/".into();
    }
    let mut out = String::new();
    for seg in path.split('.') {
        let mut rest = seg;
        while let Some(open) = rest.find('[') {
            let name = &rest[..open];
            if !name.is_empty() {
                out.push('/');
                out.push_str(name);
            }
            let close = rest[open..]
                .find(']')
                .map(|c| c + open)
                .unwrap_or(rest.len() - 1);
            out.push('/');
            out.push_str(&rest[open + 1..close]);
            rest = &rest[(close + 1).min(rest.len())..];
        }
        if !rest.is_empty() {
            out.push('/');
            out.push_str(rest);
        }
    }
    out
}

/// A parsed, validated scenario with everything the analyses share.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub hash: String,
    pub system: Option<BuiltSystem>,
    pub signal: Option<Signal>,
    pub z0: Option<DVector<f64>>,
}

#[derive(Debug, Clone)]
pub struct BuiltSystem {
    pub system: LinearSystem,
    pub truncation_caveat: Option<&'static str>,
    pub eigenvalues: Option<Vec<f64>>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(s, "{b:02x}");
    }
    s
}

pub fn load(path: &Path) -> Result<Loaded, ScenarioError> {
    let bytes =
        fs::read(path).map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
    parse(&bytes)
}

pub fn parse(bytes: &[u8]) -> Result<Loaded, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = to_pointer(&e.path().to_string());
        schema(pointer, e.inner().to_string())
    })?;
    let hash = sha256_hex(bytes);
    validate(scenario, hash)
}

fn matrix(rows: &[Vec<f64>], pointer: &str) -> Result<DMatrix<f64>, ScenarioError> {
    let r = rows.len();
    let c = rows.first().map(|x| x.len()).unwrap_or(0);
    if r == 0 || c == 0 {
        return Err(schema(pointer, "matrix must be nonempty"));
    }
    if let Some(i) = rows.iter().position(|x| x.len() != c) {
        return Err(schema(
            format!("{pointer}/{i}"),
            format!("row has {} entries, expected {c}", rows[i].len()),
        ));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn build_system(spec: &SystemSpec) -> Result<BuiltSystem, ScenarioError> {
    let at = |field: &str, e: Error| schema(format!("/system/{field}"), e.to_string());
    match spec.kind {
        SystemKind::Matrices => {
            let a = spec
                .a
                .as_ref()
                .ok_or_else(|| schema("/system/A", "missing A"))?;
            let b = spec
                .b
                .as_ref()
                .ok_or_else(|| schema("/system/B", "missing B"))?;
            let sys = LinearSystem::new(matrix(a, "/system/A")?, matrix(b, "/system/B")?)
                .map_err(|e| at("A", e))?;
            Ok(BuiltSystem {
                system: sys,
                truncation_caveat: None,
                eigenvalues: None,
            })
        }
        SystemKind::WaveModal => {
            let damping = match (spec.omega, spec.uniform) {
                (Some((a, b)), None) => WaveDamping::Localized(a, b),
                (None, Some(d0)) => WaveDamping::Uniform(d0),
                _ => {
                    return Err(schema(
                        "/system",
                        "wave-modal needs exactly one of `omega` and `uniform`",
                    ))
                }
            };
            let wspec = match (&spec.eigenvalues, spec.n_modes) {
                (Some(e), _) => WaveModalSpec {
                    eigenvalues: e.clone(),
                    damping,
                },
                (None, Some(n)) => WaveModalSpec::unit_interval(n, damping),
                (None, None) => return Err(schema("/system/n_modes", "missing n_modes")),
            };
            let m = modal::build_wave(&wspec).map_err(|e| at("n_modes", e))?;
            Ok(BuiltSystem {
                system: m.system,
                truncation_caveat: m.truncation_caveat,
                eigenvalues: Some(m.eigenvalues),
            })
        }
        SystemKind::SchrodingerModal => {
            let n = spec
                .n_modes
                .ok_or_else(|| schema("/system/n_modes", "missing n_modes"))?;
            let omega = spec
                .omega
                .ok_or_else(|| schema("/system/omega", "missing omega"))?;
            let m = modal::build_schrodinger(&SchrodingerModalSpec { n_modes: n, omega })
                .map_err(|e| at("omega", e))?;
            Ok(BuiltSystem {
                system: m.system,
                truncation_caveat: m.truncation_caveat,
                eigenvalues: Some(m.eigenvalues),
            })
        }
    }
}

fn build_signal(spec: &SignalSpec, horizon: f64) -> Result<Signal, Error> {
    match spec {
        SignalSpec::Literal {
            breakpoints,
            values,
            tail,
        } => Signal::piecewise(breakpoints.clone(), values.clone(), *tail),
        SignalSpec::Constant { level } => Signal::constant(*level),
        SignalSpec::PeriodicGate {
            period,
            halfwidth,
            horizon: h,
        } => Signal::periodic_gate(*period, *halfwidth, h.unwrap_or(horizon)),
        SignalSpec::Intervals { intervals, level } => Signal::from_intervals(intervals, *level),
        SignalSpec::HarauxGap { n_max } => Signal::haraux_gap(*n_max).map(|(s, _)| s),
    }
}

fn positive(v: f64, pointer: &str) -> Result<(), ScenarioError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(schema(pointer, format!("{v} must be positive and finite")))
    }
}

fn check_mu(t: f64, mu: f64, base: &str) -> Result<(), ScenarioError> {
    positive(t, &format!("{base}/T"))?;
    if !(mu > 0.0 && mu <= t) {
        return Err(schema(
            format!("{base}/mu"),
            format!("mu = {mu} must lie in (0, T = {t}]"),
        ));
    }
    Ok(())
}

fn validate(scenario: Scenario, hash: String) -> Result<Loaded, ScenarioError> {
    if !(scenario.horizon >= 0.0 && scenario.horizon.is_finite()) {
        return Err(schema("/horizon", "horizon must be finite and >= 0"));
    }
    positive(scenario.dt_out, "/dt_out")?;
    let system = scenario.system.as_ref().map(build_system).transpose()?;
    let signal = scenario
        .signal
        .as_ref()
        .map(|s| build_signal(s, scenario.horizon).map_err(|e| schema("/signal", e.to_string())))
        .transpose()?;
    let z0 = match (&system, &scenario.z0) {
        (Some(s), Some(z)) => {
            if z.len() != s.system.dim() {
                return Err(schema(
                    "/z0",
                    format!(
                        "length {} differs from the system dimension {}",
                        z.len(),
                        s.system.dim()
                    ),
                ));
            }
            if z.iter().all(|x| *x == 0.0) || z.iter().any(|x| !x.is_finite()) {
                return Err(schema("/z0", "z0 must be finite and nonzero"));
            }
            Some(DVector::from_column_slice(z))
        }
        (Some(s), None) => {
            let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
            let z = DVector::from_fn(s.system.dim(), |_, _| rng.random_range(-1.0..1.0));
            Some(z.normalize())
        }
        (None, Some(_)) => return Err(schema("/z0", "z0 given without a system")),
        (None, None) => None,
    };

    for (i, an) in scenario.analyses.iter().enumerate() {
        let base = format!("/analyses/{i}");
        let needs_system = !matches!(
            an,
            Analysis::Counterexample { .. }
                | Analysis::WindowScan { .. }
                | Analysis::CheckPe { .. }
        );
        if needs_system && system.is_none() {
            return Err(schema(
                "/system",
                format!("analysis {i} ({}) needs a system", an.kind()),
            ));
        }
        match an {
            Analysis::Simulate { .. } => {
                if signal.is_none() {
                    return Err(schema("/signal", "simulate needs a signal"));
                }
            }
            Analysis::CheckPe { t, mu, .. } => {
                check_mu(*t, *mu, &base)?;
                if signal.is_none() {
                    return Err(schema("/signal", "check-pe needs a signal"));
                }
                if scenario.horizon < *t {
                    return Err(schema(
                        "/horizon",
                        format!("horizon {} shorter than T = {t}", scenario.horizon),
                    ));
                }
            }
            Analysis::Counterexample { omega, periods } => {
                dalembert::build_counterexample(*omega)
                    .map_err(|e| schema(format!("{base}/omega"), e.to_string()))?;
                if *periods == 0 {
                    return Err(schema(format!("{base}/periods"), "at least one period"));
                }
            }
            Analysis::Observability { class, n_cells, .. } => {
                class
                    .validate()
                    .map_err(|e| schema(format!("{base}/class"), e.to_string()))?;
                if *n_cells < 4 {
                    return Err(schema(
                        format!("{base}/n_cells"),
                        "n_cells must be at least 4",
                    ));
                }
            }
            Analysis::KappaScan {
                rho,
                t_grid,
                n_cells,
                ..
            } => {
                if !(*rho > 0.0 && *rho <= 1.0) {
                    return Err(schema(
                        format!("{base}/rho"),
                        format!("rho = {rho} must lie in (0, 1]"),
                    ));
                }
                if let Some(k) = t_grid.iter().position(|t| !(*t > 0.0 && *t <= 1.0)) {
                    return Err(schema(format!("{base}/T_grid/{k}"), "T must lie in (0, 1]"));
                }
                if t_grid.len() < 2 {
                    return Err(schema(format!("{base}/T_grid"), "need at least two times"));
                }
                if *n_cells < 4 {
                    return Err(schema(
                        format!("{base}/n_cells"),
                        "n_cells must be at least 4",
                    ));
                }
            }
            Analysis::Certify {
                t,
                mu,
                theta,
                trials,
                ..
            } => {
                check_mu(*t, *mu, &base)?;
                if let Some(th) = theta {
                    if !(*th >= *t) {
                        return Err(schema(format!("{base}/theta"), "theta must be >= T"));
                    }
                }
                if *trials == 0 {
                    return Err(schema(format!("{base}/trials"), "at least one trial"));
                }
            }
            Analysis::StrongStability {
                intervals,
                rho,
                costs,
                explicit_costs,
                ..
            } => {
                IntervalSequence::new(intervals.clone(), *rho)
                    .map_err(|e| schema(format!("{base}/intervals"), e.to_string()))?;
                if matches!(costs, CostSource::Explicit) && explicit_costs.is_none() {
                    return Err(schema(
                        format!("{base}/explicit_costs"),
                        "explicit cost source needs explicit_costs",
                    ));
                }
            }
            Analysis::WindowScan {
                omega,
                max_modes,
                t,
                mu,
                ..
            } => {
                check_mu(*t, *mu, &base)?;
                if *max_modes == 0 {
                    return Err(schema(format!("{base}/max_modes"), "at least one mode"));
                }
                let (a, b) = *omega;
                if !(0.0 <= a && a < b && b <= 1.0) {
                    return Err(schema(format!("{base}/omega"), "need 0 <= a < b <= 1"));
                }
            }
        }
    }
    Ok(Loaded {
        scenario,
        hash,
        system,
        signal,
        z0,
    })
}

/// One analysis's output before it is written to disk.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub result: Value,
    pub csv: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn outer_or_seeded(outer: &Option<OuterSearch>, seed: u64) -> OuterSearch {
    outer.unwrap_or(OuterSearch {
        seed,
        ..OuterSearch::default()
    })
}

fn run_one(ld: &Loaded, index: usize) -> Result<Outcome, ScenarioError> {
    let sc = &ld.scenario;
    let an = &sc.analyses[index];
    let at = |e: Error| classify(format!("/analyses/{index}"), e);
    let sys = || &ld.system.as_ref().expect("validated").system;
    match an {
        Analysis::Simulate { with_state } => {
            let sig = ld.signal.as_ref().expect("validated");
            let z0 = ld.z0.as_ref().expect("validated");
            let traj = sys().simulate(sig, z0, sc.horizon, sc.dt_out).map_err(at)?;
            let balance = traj.energy_balance();
            let increase = traj.max_energy_increase();
            let passed = increase <= 1e-9 * traj.energies[0].max(1.0);
            let mut csv = Vec::new();
            traj.write_csv(&mut csv, *with_state)
                .map_err(|e| ScenarioError::Io(e.to_string()))?;
            Ok(Outcome {
                passed,
                result: json!({
                    "samples": traj.len(),
                    "V0": traj.energies[0],
                    "V_final": traj.energies[traj.len() - 1],
                    "max_energy_increase": increase,
                    "energy_balance": balance,
                    "z0": ld.z0.as_ref().map(|z| z.iter().copied().collect::<Vec<_>>()),
                }),
                csv: Some(String::from_utf8(csv).expect("csv is utf-8")),
            })
        }
        Analysis::CheckPe { t, mu, expect } => {
            let sig = ld.signal.as_ref().expect("validated");
            let rep = sig.pe_check(*t, *mu, sc.horizon).map_err(at)?;
            Ok(Outcome {
                passed: rep.holds == *expect,
                result: json!({ "report": rep, "expect": expect }),
                csv: None,
            })
        }
        Analysis::Counterexample { omega, periods } => {
            let rep = dalembert::counterexample_report(*omega, *periods).map_err(at)?;
            Ok(Outcome {
                passed: rep.inert && rep.energy_drift <= 1e-8,
                result: to_value(&rep),
                csv: None,
            })
        }
        Analysis::Observability {
            class,
            n_cells,
            outer,
        } => {
            let est = observability::class_constant(
                sys(),
                class,
                *n_cells,
                &outer_or_seeded(outer, sc.seed),
            )
            .map_err(at)?;
            let bound = class.horizon() * sys().b_norm().powi(2);
            let passed = est.witness_residual.abs() <= 1e-8 && est.c <= bound * (1.0 + 1e-12);
            Ok(Outcome {
                passed,
                result: json!({ "estimate": est, "necessary_bound": bound }),
                csv: None,
            })
        }
        Analysis::KappaScan {
            rho,
            t_grid,
            n_cells,
            outer,
            slope_range,
        } => {
            let scan = observability::kappa_scan(
                sys(),
                *rho,
                t_grid,
                *n_cells,
                &outer_or_seeded(outer, sc.seed),
            )
            .map_err(at)?;
            let passed = slope_range.is_none_or(|(lo, hi)| scan.slope >= lo && scan.slope <= hi);
            let mut csv = String::from("T,c\n");
            for (t, c) in &scan.points {
                let _ = writeln!(csv, "{t},{c}");
            }
            Ok(Outcome {
                passed,
                result: json!({ "scan": scan, "slope_range": slope_range }),
                csv: Some(csv),
            })
        }
        Analysis::Certify {
            t,
            mu,
            constant,
            theta,
            trials,
            horizon,
            dt_out,
        } => {
            let s = sys();
            let theta = theta.unwrap_or(*t);
            let (c, source) = match constant {
                ConstantSpec::Explicit { c } => (*c, "explicit constant".to_string()),
                ConstantSpec::WavePeBound { lambda_min, d0 } => (
                    observability::wave_pe_lower_bound(*t, *mu, *lambda_min, *d0).map_err(at)?,
                    "wave PE lower bound".to_string(),
                ),
                ConstantSpec::Numerical { n_cells, outer } => {
                    let class = SignalClass::pe_windows(*t, *mu, Some(theta)).map_err(at)?;
                    let est = observability::class_constant(
                        s,
                        &class,
                        *n_cells,
                        &outer_or_seeded(outer, sc.seed),
                    )
                    .map_err(at)?;
                    (est.c, "numerical class constant".to_string())
                }
            };
            let cert = stability::certificate_from_constant(c, theta, s.b_norm())
                .map_err(at)?
                .with_source(source);
            let family = PeFamily::new(*t, *mu).map_err(at)?;
            let check = stability::verify_certificate(
                s,
                &cert,
                &family,
                *trials,
                horizon.unwrap_or(sc.horizon),
                dt_out.unwrap_or(sc.dt_out),
                sc.seed,
                &[],
            )
            .map_err(at)?;
            let passed = check.passed && check.trials.iter().all(|t| t.pe_ok);
            let mut csv = String::from("trial,pe_ok,margin,worst_time\n");
            for tr in &check.trials {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    tr.index, tr.pe_ok, tr.margin, tr.worst_time
                );
            }
            Ok(Outcome {
                passed,
                result: to_value(&check),
                csv: Some(csv),
            })
        }
        Analysis::StrongStability {
            intervals,
            rho,
            costs,
            explicit_costs,
            t0,
            c_of_t,
        } => {
            let s = sys();
            let mut seq = IntervalSequence::new(intervals.clone(), *rho).map_err(at)?;
            if let Some(ec) = explicit_costs {
                seq = seq.with_costs(ec.clone()).map_err(at)?;
            }
            let sig = match &ld.signal {
                Some(sig) => sig.clone(),
                None => seq.to_signal(*rho).map_err(at)?,
            };
            let z0 = ld.z0.as_ref().expect("validated");
            let report =
                stability::interval_product_bound(s, &seq, costs, Some((&sig, z0))).map_err(at)?;
            let criterion = match c_of_t {
                Some(points) => {
                    let table = TabulatedCost::new(points.clone()).map_err(at)?;
                    let t0 = t0.unwrap_or_else(|| seq.lengths().fold(0.0, f64::max));
                    Some(
                        stability::rho_class_criterion(&seq, &table, t0, Some((s, &sig, z0)))
                            .map_err(at)?,
                    )
                }
                None => None,
            };
            let mut csv = String::from("n,factor,cumulative_bound,measured_ratio\n");
            for r in &report.rows {
                let m = r.measured_ratio.map(|x| x.to_string()).unwrap_or_default();
                let _ = writeln!(csv, "{},{},{},{}", r.n, r.factor, r.cumulative_bound, m);
            }
            Ok(Outcome {
                passed: report.consistent,
                result: json!({ "product_bound": report, "criterion": criterion }),
                csv: Some(csv),
            })
        }
        Analysis::WindowScan {
            omega,
            max_modes,
            t,
            mu,
            n_cells,
            outer,
        } => {
            let scan = observability::window_scan(
                *omega,
                *max_modes,
                *t,
                *mu,
                *n_cells,
                &outer_or_seeded(outer, sc.seed),
            )
            .map_err(at)?;
            let mut csv = String::from("n_modes,free_value,interval_value\n");
            for r in &scan.rows {
                let _ = writeln!(csv, "{},{},{}", r.n_modes, r.free_value, r.interval_value);
            }
            Ok(Outcome {
                passed: true,
                result: to_value(&scan),
                csv: Some(csv),
            })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub index: usize,
    pub kind: &'static str,
    pub passed: bool,
    pub json: PathBuf,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub artifacts: Vec<Artifact>,
    pub all_passed: bool,
}

/// Runs the analyses (all, or only those of kind `only`) and writes their artifacts to `out_dir`.
pub fn run(
    ld: &Loaded,
    out_dir: &Path,
    parallel: bool,
    only: Option<&str>,
) -> Result<RunSummary, ScenarioError> {
    let selected: Vec<usize> = (0..ld.scenario.analyses.len())
        .filter(|&i| only.is_none_or(|k| ld.scenario.analyses[i].kind() == k))
        .collect();
    if selected.is_empty() {
        return Err(schema(
            "/analyses",
            match only {
                Some(k) => format!("no `{k}` analysis in the scenario"),
                None => "no analyses requested".into(),
            },
        ));
    }
    let outcomes: Vec<Result<Outcome, ScenarioError>> = if parallel {
        selected.par_iter().map(|&i| run_one(ld, i)).collect()
    } else {
        selected.iter().map(|&i| run_one(ld, i)).collect()
    };
    fs::create_dir_all(out_dir)
        .map_err(|e| ScenarioError::Io(format!("{}: {e}", out_dir.display())))?;

    let caveat = ld.system.as_ref().and_then(|s| s.truncation_caveat);
    let mut artifacts = Vec::with_capacity(selected.len());
    for (&i, outcome) in selected.iter().zip(outcomes) {
        let outcome = outcome?;
        let kind = ld.scenario.analyses[i].kind();
        let stem = format!("{i:02}_{kind}");
        let csv_path = outcome
            .csv
            .as_ref()
            .map(|_| out_dir.join(format!("{stem}.csv")));
        let mut report = json!({
            "analysis": kind,
            "index": i,
            "scenario_hash": ld.hash,
            "tool_version": VERSION,
            "seed": ld.scenario.seed,
            "passed": outcome.passed,
            "result": outcome.result,
        });
        let uses_system = !matches!(kind, "counterexample" | "check-pe");
        if let (Some(c), true) = (caveat, uses_system) {
            report["truncation_caveat"] = Value::from(c);
        }
        if let Some(p) = &csv_path {
            report["csv"] = Value::from(p.file_name().and_then(|n| n.to_str()).unwrap_or_default());
        }
        let json_path = out_dir.join(format!("{stem}.json"));
        write_file(
            &json_path,
            serde_json::to_string_pretty(&report)
                .expect("json")
                .as_bytes(),
        )?;
        if let (Some(p), Some(csv)) = (&csv_path, &outcome.csv) {
            write_file(p, csv.as_bytes())?;
        }
        artifacts.push(Artifact {
            index: i,
            kind,
            passed: outcome.passed,
            json: json_path,
            csv: csv_path,
        });
    }
    let all_passed = artifacts.iter().all(|a| a.passed);
    Ok(RunSummary {
        artifacts,
        all_passed,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ScenarioError> {
    let mut f = fs::File::create(path)
        .map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
    f.write_all(bytes)
        .and_then(|_| f.write_all(b"\n"))
        .map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointers() {
        assert_eq!(to_pointer("analyses[1].mu"), "/analyses/1/mu");
        assert_eq!(to_pointer("system.A[0][2]"), "/system/A/0/2");
        assert_eq!(to_pointer("."), "/");
    }

    #[test]
    fn mu_above_t_points_at_field() {
        let src = br#"{ "signal": {"kind": "constant", "level": 1}, "horizon": 4,
            "analyses": [ {"kind": "check-pe", "T": 1, "mu": 0.5}, {"kind": "check-pe", "T": 1, "mu": 2} ] }"#;
        match parse(src) {
            Err(ScenarioError::Schema { pointer, .. }) => assert_eq!(pointer, "/analyses/1/mu"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_field_and_bad_signal() {
        let src = br#"{ "analyses": [ {"kind": "simulate", "bogus": 1} ] }"#;
        match parse(src) {
            Err(ScenarioError::Schema { pointer, .. }) => {
                assert!(pointer.starts_with("/analyses/0"), "{pointer}")
            }
            other => panic!("{other:?}"),
        }
        let src = br#"{ "signal": {"kind": "literal", "breakpoints": [1], "values": [2], "tail": 0}, "analyses": [] }"#;
        match parse(src) {
            Err(ScenarioError::Schema { pointer, .. }) => assert_eq!(pointer, "/signal"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
