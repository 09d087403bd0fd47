//! Generalized observability constants over signal classes.
//!
//! The quantity of interest is
//!
//! ```text
//! c = min_{|z0| = 1} min_{alpha in class} int_0^theta alpha(t) |B^* e^{tA} z0|^2 dt.
//! ```
//!
//! Signals are discretized into `n_cells` equal cells. On that grid the integral is
//! `sum_j alpha_j z0^T Q_j z0` with the cell Gramians `Q_j = int_{cell j} e^{tA^T} B B^T e^{tA} dt`,
//! so the inner problem is a linear program in `alpha` and, for a fixed `alpha`, the outer
//! problem is a symmetric eigenvalue problem. The outer search alternates the two.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg;
use crate::linsys::{panel_count, LinearSystem};
use crate::lp::{LinearProgram, Relation};
use crate::modal::{self, SchrodingerModalSpec, TRUNCATION_CAVEAT};
use crate::quad::GaussLegendre;
use crate::signals::Signal;

/// Default state-dimension limit for the outer sphere search.
pub const OUTER_DIM_LIMIT: usize = 16;

/// Label attached to every window-scan report.
pub const EXPLORATION_LABEL: &str = "exploration of an open problem; no claim";

const GL_ORDER: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SignalClass {
    /// Signals on `[0, T]` with mass at least `rho T`.
    RhoIntegral {
        rho: f64,
        #[serde(rename = "T")]
        t: f64,
    },
    /// Signals on `[0, theta]` whose mass on every window `[s, s+T]` in `[0, theta]` is at least `mu`.
    PeWindows {
        #[serde(rename = "T")]
        t: f64,
        mu: f64,
        #[serde(default)]
        theta: Option<f64>,
    },
}

impl SignalClass {
    pub fn rho_integral(rho: f64, t: f64) -> Result<Self> {
        let c = SignalClass::RhoIntegral { rho, t };
        c.validate()?;
        Ok(c)
    }

    /// PE class with horizon `theta` (defaults to `T`).
    pub fn pe_windows(t: f64, mu: f64, theta: Option<f64>) -> Result<Self> {
        let c = SignalClass::PeWindows { t, mu, theta };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SignalClass::RhoIntegral { rho, t } => {
                if !(rho > 0.0 && rho <= 1.0) {
                    return Err(Error::arg("rho", format!("rho = {rho} must lie in (0, 1]")));
                }
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::arg("T", format!("T = {t} must be positive")));
                }
            }
            SignalClass::PeWindows { t, mu, theta } => {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::arg("T", format!("T = {t} must be positive")));
                }
                if !(mu > 0.0 && mu <= t) {
                    return Err(Error::Infeasible(format!(
                        "mu = {mu} must lie in (0, T = {t}]"
                    )));
                }
                let th = theta.unwrap_or(t);
                if !(th >= t && th.is_finite()) {
                    return Err(Error::arg(
                        "theta",
                        format!("theta = {th} must be >= T = {t}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Length of the interval the signals live on.
    pub fn horizon(&self) -> f64 {
        match *self {
            SignalClass::RhoIntegral { t, .. } => t,
            SignalClass::PeWindows { t, theta, .. } => theta.unwrap_or(t),
        }
    }
}

/// Cell Gramians of `(A, B)` on a uniform grid of `[0, horizon]`.
#[derive(Debug, Clone)]
pub struct CellGramians {
    pub dt: f64,
    pub cells: Vec<DMatrix<f64>>,
}

impl CellGramians {
    pub fn new(sys: &LinearSystem, horizon: f64, n_cells: usize) -> Self {
        let dt = horizon / n_cells as f64;
        let gl = GaussLegendre::new(GL_ORDER);
        let panels = panel_count(dt, sys.flow_frequency());
        let bt = sys.b().transpose();
        let cells = (0..n_cells)
            .into_par_iter()
            .map(|j| {
                let (lo, hi) = (j as f64 * dt, (j + 1) as f64 * dt);
                let h = (hi - lo) / panels as f64;
                let mut q = DMatrix::zeros(sys.dim(), sys.dim());
                for p in 0..panels {
                    let a = lo + p as f64 * h;
                    for (t, w) in gl.mapped(a, a + h) {
                        let phi = &bt * sys.free_flow(t);
                        q += phi.transpose() * phi * w;
                    }
                }
                (&q + q.transpose()) * 0.5
            })
            .collect();
        CellGramians { dt, cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `z^T Q_j z` for every cell, i.e. the cell integrals of `|B^* e^{tA} z|^2`.
    pub fn cell_integrals(&self, z: &DVector<f64>) -> Vec<f64> {
        self.cells.iter().map(|q| q.quadratic_form(z)).collect()
    }

    /// `sum_j alpha_j Q_j`.
    pub fn weighted(&self, alpha: &[f64]) -> DMatrix<f64> {
        let n = self.cells[0].nrows();
        let mut m = DMatrix::zeros(n, n);
        for (q, &a) in self.cells.iter().zip(alpha) {
            if a != 0.0 {
                m += q * a;
            }
        }
        m
    }
}

trait QuadraticForm {
    fn quadratic_form(&self, z: &DVector<f64>) -> f64;
}

impl QuadraticForm for DMatrix<f64> {
    fn quadratic_form(&self, z: &DVector<f64>) -> f64 {
        z.dot(&(self * z))
    }
}

/// `int_0^theta alpha(t) |B^* e^{tA} z0|^2 dt` with an `n_quad`-point Gauss-Legendre rule on
/// frequency-sized panels inside each constant piece of `alpha`.
pub fn functional(
    sys: &LinearSystem,
    sig: &Signal,
    z0: &DVector<f64>,
    theta: f64,
    n_quad: usize,
) -> Result<f64> {
    if z0.len() != sys.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has length {}, system dimension is {}",
            z0.len(),
            sys.dim()
        )));
    }
    if (z0.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::arg("z0", format!("|z0| = {} is not 1", z0.norm())));
    }
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::arg(
            "theta",
            format!("theta = {theta} must be finite and >= 0"),
        ));
    }
    let flow = sys.observed_flow(z0);
    let gl = GaussLegendre::new(n_quad.max(1));
    let freq = sys.flow_frequency();
    Ok(sig
        .pieces(0.0, theta)
        .into_iter()
        .filter(|p| p.2 > 0.0)
        .map(|(lo, hi, level)| {
            level
                * gl.integrate_composite(
                    |t| flow.norm_squared(t),
                    lo,
                    hi,
                    panel_count(hi - lo, freq),
                )
        })
        .sum())
}

/// `int_a^b alpha(t) e^{(t-a)A^T} B B^T e^{(t-a)A} dt`, whose smallest eigenvalue is the best
/// constant `c` with `int_a^b alpha(t) |B^* e^{(t-a)A} z|^2 dt >= c |z|^2`.
pub fn signal_gramian(sys: &LinearSystem, sig: &Signal, a: f64, b: f64) -> Result<DMatrix<f64>> {
    if !(0.0 <= a && a <= b && b.is_finite()) {
        return Err(Error::arg(
            "b",
            format!("need 0 <= a <= b < inf, got ({a}, {b})"),
        ));
    }
    let gl = GaussLegendre::new(GL_ORDER);
    let freq = sys.flow_frequency();
    let bt = sys.b().transpose();
    let mut w = DMatrix::zeros(sys.dim(), sys.dim());
    for (lo, hi, level) in sig.pieces(a, b) {
        if level == 0.0 {
            continue;
        }
        let panels = panel_count(hi - lo, freq);
        let h = (hi - lo) / panels as f64;
        for p in 0..panels {
            let s = lo + p as f64 * h;
            for (t, wt) in gl.mapped(s, s + h) {
                let phi = &bt * sys.free_flow(t - a);
                w += phi.transpose() * phi * (wt * level);
            }
        }
    }
    Ok((&w + w.transpose()) * 0.5)
}

/// Exact minimiser of `sum alpha_j f_j dt` over `alpha_j in [0, 1]`, `sum alpha_j dt >= rho T`
/// where `T = f.len() * dt`: full cells on the smallest values, fractional on the marginal one.
pub fn min_rho_integral(f_bar: &[f64], dt: f64, rho: f64) -> (Vec<f64>, f64) {
    let n = f_bar.len();
    let mut mass = rho * n as f64;
    if (mass - mass.round()).abs() < 1e-12 * n as f64 {
        mass = mass.round();
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| f_bar[i].total_cmp(&f_bar[j]).then(i.cmp(&j)));
    let mut alpha = vec![0.0; n];
    let mut left = mass;
    for &i in &order {
        if left <= 0.0 {
            break;
        }
        let a = left.min(1.0);
        alpha[i] = a;
        left -= a;
    }
    let value = alpha.iter().zip(f_bar).map(|(a, f)| a * f * dt).sum();
    (alpha, value)
}

/// Minimiser of `sum alpha_j f_j dt` subject to `alpha_j in [0, 1]` and mass `>= mu` on every
/// cell-aligned window of `window_cells` cells. Solved by the dense simplex.
pub fn min_pe_windows(
    f_bar: &[f64],
    dt: f64,
    window_cells: usize,
    mu: f64,
) -> Result<(Vec<f64>, f64)> {
    let n = f_bar.len();
    if window_cells == 0 || window_cells > n {
        return Err(Error::arg(
            "T",
            format!("window of {window_cells} cells on a grid of {n}"),
        ));
    }
    let scale = f_bar.iter().fold(0.0f64, |m, f| m.max(f.abs()));
    let objective: Vec<f64> = if scale > 0.0 {
        f_bar.iter().map(|f| f / scale).collect()
    } else {
        vec![0.0; n]
    };
    let rhs = mu / dt;
    let mut lp = LinearProgram::new(objective).upper_bounds(vec![1.0; n]);
    for k in 0..=(n - window_cells) {
        let mut row = vec![0.0; n];
        row[k..k + window_cells].iter_mut().for_each(|x| *x = 1.0);
        lp = lp.constraint(row, Relation::Ge, rhs);
    }
    let sol = lp.solve()?;
    let alpha: Vec<f64> = sol.x.iter().map(|a| a.clamp(0.0, 1.0)).collect();
    let value = alpha.iter().zip(f_bar).map(|(a, f)| a * f * dt).sum();
    Ok((alpha, value))
}

fn window_cells(class: &SignalClass, dt: f64) -> Result<usize> {
    match *class {
        SignalClass::PeWindows { t, .. } => {
            let w = t / dt;
            if (w - w.round()).abs() > 1e-9 * w.max(1.0) {
                return Err(Error::arg(
                    "n_cells",
                    format!("T = {t} is not a whole number of cells of length {dt}"),
                ));
            }
            Ok(w.round() as usize)
        }
        SignalClass::RhoIntegral { .. } => Ok(0),
    }
}

/// Inner minimisation over the discretized class for cell integrals `q_z[j] = z^T Q_j z`.
fn inner_from_cells(class: &SignalClass, q_z: &[f64], dt: f64) -> Result<(Vec<f64>, f64)> {
    let f_bar: Vec<f64> = q_z.iter().map(|q| q / dt).collect();
    match *class {
        SignalClass::RhoIntegral { rho, .. } => {
            let (alpha, _) = min_rho_integral(&f_bar, dt, rho);
            Ok(value_of(alpha, q_z))
        }
        SignalClass::PeWindows { mu, .. } => {
            let (alpha, _) = min_pe_windows(&f_bar, dt, window_cells(class, dt)?, mu)?;
            Ok(value_of(alpha, q_z))
        }
    }
}

fn value_of(alpha: Vec<f64>, q_z: &[f64]) -> (Vec<f64>, f64) {
    let v = alpha.iter().zip(q_z).map(|(a, q)| a * q).sum();
    (alpha, v)
}

/// Cell levels as a [`Signal`] on `[0, n dt]`, zero afterwards.
pub fn cells_to_signal(alpha: &[f64], dt: f64) -> Result<Signal> {
    let bps = (1..=alpha.len()).map(|j| j as f64 * dt).collect();
    Signal::piecewise(bps, alpha.iter().map(|a| a.clamp(0.0, 1.0)).collect(), 0.0)
}

fn check_cells(class: &SignalClass, n_cells: usize) -> Result<()> {
    class.validate()?;
    if n_cells < 4 {
        return Err(Error::arg(
            "n_cells",
            format!("n_cells = {n_cells} must be at least 4"),
        ));
    }
    Ok(())
}

/// Worst signal of the discretized class for a fixed unit state.
pub fn inner_min_signal(
    sys: &LinearSystem,
    z0: &DVector<f64>,
    class: &SignalClass,
    n_cells: usize,
) -> Result<(Signal, f64)> {
    check_cells(class, n_cells)?;
    if z0.len() != sys.dim() {
        return Err(Error::DimensionMismatch(
            "z0 length differs from the system dimension".into(),
        ));
    }
    let grams = CellGramians::new(sys, class.horizon(), n_cells);
    let (alpha, value) = inner_from_cells(class, &grams.cell_integrals(z0), grams.dt)?;
    Ok((cells_to_signal(&alpha, grams.dt)?, value))
}

/// Multi-start configuration of the outer sphere search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OuterSearch {
    pub starts: usize,
    pub max_iter: usize,
    pub seed: u64,
    pub dim_limit: usize,
}

impl Default for OuterSearch {
    fn default() -> Self {
        OuterSearch {
            starts: 8,
            max_iter: 60,
            seed: 0,
            dim_limit: OUTER_DIM_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ObservabilityEstimate {
    pub c: f64,
    pub witness_z0: Vec<f64>,
    pub witness_signal: Signal,
    pub grid_cells: usize,
    pub method: &'static str,
    pub class: SignalClass,
    pub seed: u64,
    pub starts: usize,
    /// Second-best local value minus the best one.
    pub second_best_gap: f64,
    /// `functional(witness_signal, witness_z0) - c`.
    pub witness_residual: f64,
}

struct LocalMin {
    value: f64,
    z: DVector<f64>,
    alpha: Vec<f64>,
}

fn alternate(
    grams: &CellGramians,
    class: &SignalClass,
    mut z: DVector<f64>,
    max_iter: usize,
) -> Result<LocalMin> {
    z.normalize_mut();
    let (mut alpha, mut value) = inner_from_cells(class, &grams.cell_integrals(&z), grams.dt)?;
    for _ in 0..max_iter {
        let (lam, z_new) = linalg::min_eigenpair(&grams.weighted(&alpha));
        if lam >= value - 1e-14 * value.abs().max(1e-300) {
            break;
        }
        let (alpha_new, value_new) =
            inner_from_cells(class, &grams.cell_integrals(&z_new), grams.dt)?;
        let improved = value_new < value - 1e-13 * value.abs().max(1e-300);
        z = z_new;
        alpha = alpha_new;
        value = value_new;
        if !improved {
            break;
        }
    }
    Ok(LocalMin { value, z, alpha })
}

/// Estimate of the class constant by alternating minimisation from several starts.
pub fn class_constant(
    sys: &LinearSystem,
    class: &SignalClass,
    n_cells: usize,
    outer: &OuterSearch,
) -> Result<ObservabilityEstimate> {
    class_constant_seeded(sys, class, n_cells, outer, &[])
}

/// As [`class_constant`], with extra caller-supplied starting states.
pub fn class_constant_seeded(
    sys: &LinearSystem,
    class: &SignalClass,
    n_cells: usize,
    outer: &OuterSearch,
    extra_starts: &[DVector<f64>],
) -> Result<ObservabilityEstimate> {
    check_cells(class, n_cells)?;
    if sys.dim() > outer.dim_limit {
        return Err(Error::DimensionLimit {
            dim: sys.dim(),
            limit: outer.dim_limit,
        });
    }
    let n = sys.dim();
    let grams = CellGramians::new(sys, class.horizon(), n_cells);
    window_cells(class, grams.dt)?;

    let mut starts: Vec<DVector<f64>> = Vec::new();
    // Start from the minimiser of the full-signal Gramian, then random unit vectors.
    starts.push(linalg::min_eigenpair(&grams.weighted(&vec![1.0; n_cells])).1);
    let mut rng = ChaCha8Rng::seed_from_u64(outer.seed);
    for _ in 1..outer.starts.max(1) {
        starts.push(DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)));
    }
    starts.extend(extra_starts.iter().cloned());
    for z in &starts {
        if z.len() != n || z.norm() == 0.0 {
            return Err(Error::arg(
                "z0",
                "starting states must be nonzero with the system dimension",
            ));
        }
    }

    let results: Vec<LocalMin> = starts
        .into_par_iter()
        .map(|z| alternate(&grams, class, z, outer.max_iter))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..results.len()).collect();
    order.sort_by(|&i, &j| {
        results[i]
            .value
            .total_cmp(&results[j].value)
            .then(i.cmp(&j))
    });
    let best = &results[order[0]];
    let second_best_gap = order
        .get(1)
        .map(|&i| results[i].value - best.value)
        .unwrap_or(0.0);

    let signal = cells_to_signal(&best.alpha, grams.dt)?;
    let mut z = best.z.clone();
    z.normalize_mut();
    let check = functional(sys, &signal, &z, class.horizon(), GL_ORDER)?;
    Ok(ObservabilityEstimate {
        c: best.value,
        witness_z0: z.iter().copied().collect(),
        witness_signal: signal,
        grid_cells: n_cells,
        method: "alternating-minimisation",
        class: *class,
        seed: outer.seed,
        starts: results.len(),
        second_best_gap,
        witness_residual: check - best.value,
    })
}

/// Certified lower bound for the PE class on the uniformly damped string:
/// `d0^2 mu eps^2 / 2` with `eps = min(1, (mu/2) / (2T/pi + 2/lambda_min))`.
pub fn wave_pe_lower_bound(t: f64, mu: f64, lambda_min: f64, d0: f64) -> Result<f64> {
    if !(mu > 0.0 && mu <= t) {
        return Err(Error::Infeasible(format!(
            "mu = {mu} must lie in (0, T = {t}]"
        )));
    }
    if !(lambda_min > 0.0) {
        return Err(Error::arg("lambda_min", "must be positive"));
    }
    if !(d0 > 0.0) {
        return Err(Error::arg("d0", "must be positive"));
    }
    let eps = wave_pe_eps(t, mu, lambda_min);
    Ok(d0 * d0 * mu * eps * eps / 2.0)
}

/// The `eps` used by [`wave_pe_lower_bound`].
pub fn wave_pe_eps(t: f64, mu: f64, lambda_min: f64) -> f64 {
    ((mu / 2.0) / (2.0 * t / PI + 2.0 / lambda_min)).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoBound {
    pub c: f64,
    pub eps: f64,
    pub threshold: f64,
}

/// Largest `T` for which the small-time string bound applies: `eps = rho lambda1 T / 6 <= 1` and
/// the excluded measure stays below `rho T / 2`.
pub fn wave_rho_threshold(rho: f64, lambda1: f64) -> f64 {
    (6.0 / (rho * lambda1)).min(PI / (2.0 * lambda1))
}

/// Small-time string bound `d0^2 rho^3 lambda1^2 T^3 / 72`, refused above the threshold.
pub fn wave_rho_lower_bound(t: f64, rho: f64, lambda1: f64, d0: f64) -> Result<RhoBound> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::arg("rho", format!("rho = {rho} must lie in (0, 1]")));
    }
    if !(lambda1 > 0.0 && d0 > 0.0 && t > 0.0) {
        return Err(Error::arg("T", "T, lambda1 and d0 must be positive"));
    }
    let threshold = wave_rho_threshold(rho, lambda1);
    if t > threshold {
        return Err(Error::AboveThreshold { t, threshold });
    }
    Ok(RhoBound {
        c: d0 * d0 * rho.powi(3) * lambda1 * lambda1 * t.powi(3) / 72.0,
        eps: rho * lambda1 * t / 6.0,
        threshold,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaScan {
    pub kalman_index: usize,
    pub expected_slope: f64,
    pub slope: f64,
    pub intercept: f64,
    pub kappa: f64,
    /// `(T, c(T))` pairs in input order.
    pub points: Vec<(f64, f64)>,
    pub seed: u64,
}

/// Least-squares `(slope, intercept, r^2)` of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    (slope, my - slope * mx, r2)
}

/// `c(T)` for the `rho`-class over `t_grid`, fitted as `kappa T^slope`.
pub fn kappa_scan(
    sys: &LinearSystem,
    rho: f64,
    t_grid: &[f64],
    n_cells: usize,
    outer: &OuterSearch,
) -> Result<KappaScan> {
    if !sys.is_skew() {
        return Err(Error::arg("A", "kappa scan needs a skew-symmetric A"));
    }
    let k = sys.kalman_index()?;
    if t_grid.len() < 2 {
        return Err(Error::arg("T_grid", "need at least two times"));
    }
    if let Some(&bad) = t_grid.iter().find(|&&t| !(t > 0.0 && t <= 1.0)) {
        return Err(Error::arg("T_grid", format!("T = {bad} outside (0, 1]")));
    }
    let cs: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| {
            class_constant(sys, &SignalClass::rho_integral(rho, t)?, n_cells, outer).map(|e| e.c)
        })
        .collect::<Result<_>>()?;
    if let Some(i) = cs.iter().position(|&c| c <= 0.0) {
        return Err(Error::Infeasible(format!(
            "c(T = {}) = {} is not positive",
            t_grid[i], cs[i]
        )));
    }
    let lx: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = cs.iter().map(|c| c.ln()).collect();
    let (slope, intercept, _) = linear_fit(&lx, &ly);
    Ok(KappaScan {
        kalman_index: k,
        expected_slope: (2 * k + 1) as f64,
        slope,
        intercept,
        kappa: intercept.exp(),
        points: t_grid.iter().copied().zip(cs).collect(),
        seed: outer.seed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowScanRow {
    pub n_modes: usize,
    /// Worst constant over relaxed subsets of measure `mu` (signals with mass `mu` on `[0, T]`).
    pub free_value: f64,
    /// Worst constant when the subset is an interval of length `mu`.
    pub interval_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowScan {
    pub label: &'static str,
    pub truncation_caveat: &'static str,
    pub omega: (f64, f64),
    #[serde(rename = "T")]
    pub t: f64,
    pub mu: f64,
    pub rows: Vec<WindowScanRow>,
    pub trend: &'static str,
    pub seed: u64,
}

/// Worst-case window constant of the localized Schrödinger truncation for `1..=max_modes` modes.
pub fn window_scan(
    omega: (f64, f64),
    max_modes: usize,
    t: f64,
    mu: f64,
    n_cells: usize,
    outer: &OuterSearch,
) -> Result<WindowScan> {
    let class = SignalClass::rho_integral(mu / t, t)?;
    if !(mu > 0.0 && mu <= t) {
        return Err(Error::Infeasible(format!(
            "mu = {mu} must lie in (0, T = {t}]"
        )));
    }
    let dt = t / n_cells as f64;
    let w = mu / dt;
    if (w - w.round()).abs() > 1e-9 * w.max(1.0) || w.round() < 1.0 {
        return Err(Error::arg("n_cells", "mu must be a whole number of cells"));
    }
    let w = w.round() as usize;
    let mut rows = Vec::with_capacity(max_modes);
    for n in 1..=max_modes {
        let sys = modal::build_schrodinger(&SchrodingerModalSpec { n_modes: n, omega })?.system;
        // The unitary flow makes the interval value independent of the interval's position.
        let grams = CellGramians::new(&sys, t, n_cells);
        let mut alpha = vec![0.0; n_cells];
        alpha[..w].iter_mut().for_each(|a| *a = 1.0);
        let (interval_value, z_int) = linalg::min_eigenpair(&grams.weighted(&alpha));
        let est = class_constant_seeded(&sys, &class, n_cells, outer, &[z_int])?;
        rows.push(WindowScanRow {
            n_modes: n,
            free_value: est.c,
            interval_value,
        });
    }
    let first = rows.first().map(|r| r.free_value).unwrap_or(0.0);
    let last = rows.last().map(|r| r.free_value).unwrap_or(0.0);
    let trend = if last < 0.95 * first {
        "decreasing"
    } else {
        "plateau"
    };
    Ok(WindowScan {
        label: EXPLORATION_LABEL,
        truncation_caveat: TRUNCATION_CAVEAT,
        omega,
        t,
        mu,
        rows,
        trend,
        seed: outer.seed,
    })
}
