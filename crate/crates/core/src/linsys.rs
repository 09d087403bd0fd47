//! Finite-dimensional dissipative pairs `(A, B)` and their exact simulation under
//! piecewise-constant damping signals.
//!
//! On every maximal cell where `alpha` is constant at level `a`, the state is advanced by
//! `exp((A - a B B^T) h)`, which is the mild solution for that cell. No time stepping
//! error enters apart from the matrix exponential itself.

use std::collections::HashMap;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ObservedFlow, SkewFlow};
use crate::quad::GaussLegendre;
use crate::signals::Signal;

/// Default bound on the state dimension.
pub const DEFAULT_DIM_LIMIT: usize = 256;

/// Dissipativity tolerance on the largest eigenvalue of `(A + A^T)/2`.
pub const DISSIPATIVITY_TOL: f64 = 1e-9;

/// A dissipative pair `(A, B)` with `A` of size `N x N` and `B` of size `N x r`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    bbt: DMatrix<f64>,
    b_norm: f64,
    skew: bool,
    flow: Option<SkewFlow>,
}

impl LinearSystem {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        Self::with_dim_limit(a, b, DEFAULT_DIM_LIMIT)
    }

    pub fn with_dim_limit(a: DMatrix<f64>, b: DMatrix<f64>, limit: usize) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, expected square",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty state space".into()));
        }
        if n > limit {
            return Err(Error::DimensionLimit { dim: n, limit });
        }
        if b.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows, A is {n}x{n}",
                b.nrows()
            )));
        }
        if a.iter().chain(b.iter()).any(|x| !x.is_finite()) {
            return Err(Error::DimensionMismatch(
                "A or B has non-finite entries".into(),
            ));
        }
        let max_eig = linalg::max_symmetric_eigenvalue(&a);
        if max_eig > DISSIPATIVITY_TOL {
            return Err(Error::NotDissipative { max_eig });
        }
        let scale = a.amax().max(1.0);
        let skew = (&a + a.transpose()).amax() <= 1e-12 * scale;
        let flow = skew.then(|| SkewFlow::new(&a));
        let bbt = &b * b.transpose();
        let b_norm = linalg::spectral_norm(&b);
        Ok(LinearSystem {
            a,
            b,
            bbt,
            b_norm,
            skew,
            flow,
        })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// `B B^*`.
    pub fn bbt(&self) -> &DMatrix<f64> {
        &self.bbt
    }

    /// Operator norm `||B||` (largest singular value).
    pub fn b_norm(&self) -> f64 {
        self.b_norm
    }

    pub fn is_skew(&self) -> bool {
        self.skew
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    /// Same `A`, with `B` multiplied by `s`.
    pub fn scaled_input(&self, s: f64) -> Result<Self> {
        Self::new(self.a.clone(), &self.b * s)
    }

    /// Closed-loop generator `A - level B B^*`.
    pub fn closed_loop(&self, level: f64) -> DMatrix<f64> {
        &self.a - &self.bbt * level
    }

    /// `exp(tA)` (spectral path for skew `A`, Padé otherwise).
    pub fn free_flow(&self, t: f64) -> DMatrix<f64> {
        match &self.flow {
            Some(flow) => flow.exp(t),
            None => linalg::expm(&(&self.a * t)),
        }
    }

    /// Largest angular frequency of the free flow, used to size quadrature panels.
    pub(crate) fn flow_frequency(&self) -> f64 {
        match &self.flow {
            Some(flow) => flow.max_frequency(),
            None => linalg::spectral_norm(&self.a),
        }
    }

    /// `t -> B^* exp(tA) z0` for repeated evaluation.
    pub(crate) fn observed_flow(&self, z0: &DVector<f64>) -> OutputFlow<'_> {
        match &self.flow {
            Some(flow) => OutputFlow::Skew(flow.observed(&self.b.transpose(), z0)),
            None => OutputFlow::Dense {
                sys: self,
                z0: z0.clone(),
            },
        }
    }

    fn check_state(&self, z0: &DVector<f64>) -> Result<()> {
        if z0.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state has length {}, system dimension is {}",
                z0.len(),
                self.dim()
            )));
        }
        if z0.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { time: 0.0 });
        }
        Ok(())
    }

    /// State at `t1` of the damped system started from `z` at `t0`.
    pub fn propagate(
        &self,
        sig: &Signal,
        z: &DVector<f64>,
        t0: f64,
        t1: f64,
    ) -> Result<DVector<f64>> {
        self.check_state(z)?;
        if !(0.0 <= t0 && t0 <= t1 && t1.is_finite()) {
            return Err(Error::arg(
                "t1",
                format!("need 0 <= t0 <= t1 < inf, got ({t0}, {t1})"),
            ));
        }
        let mut state = z.clone();
        for (lo, hi, level) in sig.pieces(t0, t1) {
            state = linalg::expm(&(self.closed_loop(level) * (hi - lo))) * state;
        }
        if state.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { time: t1 });
        }
        Ok(state)
    }

    /// Exact mild solution sampled at `k dt_out` (and at `horizon`), plus every breakpoint
    /// of `sig` inside the horizon so that each sampling interval lies in a single cell.
    pub fn simulate(
        &self,
        sig: &Signal,
        z0: &DVector<f64>,
        horizon: f64,
        dt_out: f64,
    ) -> Result<Trajectory> {
        self.check_state(z0)?;
        if !(dt_out > 0.0 && dt_out.is_finite()) {
            return Err(Error::arg(
                "dt_out",
                format!("dt_out = {dt_out} must be positive"),
            ));
        }
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::arg(
                "horizon",
                format!("horizon = {horizon} must be finite and >= 0"),
            ));
        }

        let times = sample_times(sig, horizon, dt_out);
        let bt = self.b.transpose();
        let mut cache: HashMap<(u64, u64), DMatrix<f64>> = HashMap::new();

        let mut states = Vec::with_capacity(times.len());
        let mut levels = Vec::with_capacity(times.len().saturating_sub(1));
        states.push(z0.clone());
        let mut state = z0.clone();
        for w in times.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let level = sig.eval(lo);
            let mut h = hi - lo;
            if (h - dt_out).abs() <= 1e-12 * dt_out {
                h = dt_out;
            }
            let step = cache
                .entry((level.to_bits(), h.to_bits()))
                .or_insert_with(|| linalg::expm(&(self.closed_loop(level) * h)));
            state = &*step * state;
            if state.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { time: hi });
            }
            levels.push(level);
            states.push(state.clone());
        }

        let observed: Vec<f64> = states.iter().map(|z| (&bt * z).norm_squared()).collect();
        let energies = states.iter().map(|z| 0.5 * z.norm_squared()).collect();
        let damping_rate_samples = times
            .iter()
            .zip(&observed)
            .map(|(&t, &o)| sig.eval(t) * o)
            .collect();
        Ok(Trajectory {
            times,
            states,
            energies,
            damping_rate_samples,
            observed,
            levels,
            skew: self.skew,
        })
    }

    /// Minimal `K >= 0` with `rank [B, AB, ..., A^K B] = N`. Rank is counted from singular
    /// values above `1e-9` times the largest.
    pub fn kalman_index(&self) -> Result<usize> {
        let n = self.dim();
        let r = self.inputs();
        let mut blocks = DMatrix::<f64>::zeros(n, 0);
        let mut term = self.b.clone();
        let mut rank = 0;
        for k in 0..n {
            let cols = blocks.ncols();
            blocks = blocks.insert_columns(cols, r, 0.0);
            blocks.columns_mut(cols, r).copy_from(&term);
            rank = numerical_rank(&blocks);
            if rank == n {
                return Ok(k);
            }
            term = &self.a * term;
        }
        Err(Error::Uncontrollable { rank, dim: n })
    }

    /// `sum level * int_{lo}^{hi} ||B^* exp((t - offset) A) z||^2 dt` over constant pieces.
    pub(crate) fn weighted_output_energy(
        &self,
        z: &DVector<f64>,
        pieces: &[(f64, f64, f64)],
        offset: f64,
    ) -> f64 {
        let flow = self.observed_flow(z);
        let gl = GaussLegendre::new(10);
        let freq = self.flow_frequency();
        pieces
            .iter()
            .filter(|p| p.2 > 0.0)
            .map(|&(lo, hi, level)| {
                let panels = panel_count(hi - lo, freq);
                level * gl.integrate_composite(|t| flow.norm_squared(t - offset), lo, hi, panels)
            })
            .sum()
    }

    /// Both sides of the gap estimate on `[a, b]`:
    /// `V(z(b)) - V(z(a)) <= -(2 + 2 (b-a)^2 ||B||^4)^{-1} int_0^{b-a} alpha(t+a) ||B^* e^{tA} z(a)||^2 dt`.
    pub fn gap_estimate_check(
        &self,
        sig: &Signal,
        z0: &DVector<f64>,
        a: f64,
        b: f64,
    ) -> Result<GapEstimate> {
        if !(0.0 <= a && a <= b) {
            return Err(Error::arg("a", format!("need 0 <= a <= b, got ({a}, {b})")));
        }
        let za = self.propagate(sig, z0, 0.0, a)?;
        let zb = self.propagate(sig, &za, a, b)?;
        let va = 0.5 * za.norm_squared();
        let vb = 0.5 * zb.norm_squared();
        let lhs = vb - va;
        let len = b - a;
        let factor = 1.0 / (2.0 + 2.0 * len * len * self.b_norm.powi(4));
        let integral = self.weighted_output_energy(&za, &sig.pieces(a, b), a);
        let rhs = -factor * integral;
        let tol = 1e-12 * va.max(1e-300);
        Ok(GapEstimate {
            lhs,
            rhs,
            margin: rhs - lhs,
            ok: lhs <= rhs + tol,
        })
    }
}

/// GL panels for a length-`len` interval of a flow with angular frequency up to `freq`.
pub(crate) fn panel_count(len: f64, freq: f64) -> usize {
    ((len * freq / 2.0).ceil() as usize).clamp(1, 1 << 16)
}

pub(crate) enum OutputFlow<'a> {
    Skew(ObservedFlow),
    Dense {
        sys: &'a LinearSystem,
        z0: DVector<f64>,
    },
}

impl OutputFlow<'_> {
    pub(crate) fn norm_squared(&self, t: f64) -> f64 {
        match self {
            OutputFlow::Skew(f) => f.norm_squared(t),
            OutputFlow::Dense { sys, z0 } => {
                (sys.b.transpose() * (sys.free_flow(t) * z0)).norm_squared()
            }
        }
    }
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-9 * top).count()
}

fn sample_times(sig: &Signal, horizon: f64, dt_out: f64) -> Vec<f64> {
    let k_max = (horizon / dt_out + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=k_max)
        .map(|k| (k as f64 * dt_out).min(horizon))
        .collect();
    if horizon - times[k_max] > 1e-12 * dt_out {
        times.push(horizon);
    }
    let tol = 1e-12 * dt_out.max(1.0);
    let mut merged = Vec::with_capacity(times.len() + sig.breakpoints().len());
    let mut bps = sig
        .breakpoints()
        .iter()
        .copied()
        .filter(|&b| b > 0.0 && b < horizon)
        .peekable();
    for mut t in times {
        while let Some(&b) = bps.peek() {
            if b < t - tol {
                merged.push(b);
                bps.next();
            } else if b <= t + tol {
                // A jump just after a grid time moves the sample onto the jump.
                t = t.max(b);
                bps.next();
            } else {
                break;
            }
        }
        merged.push(t);
    }
    merged
}

/// Result of [`LinearSystem::gap_estimate_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapEstimate {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; nonnegative when the inequality holds.
    pub margin: f64,
    pub ok: bool,
}

/// Sampled solution of one simulation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    /// `V = ||z||^2 / 2` at each sample.
    pub energies: Vec<f64>,
    /// `alpha(t) ||B^* z(t)||^2` at each sample (right-continuous `alpha`).
    pub damping_rate_samples: Vec<f64>,
    /// `||B^* z(t)||^2` at each sample.
    pub observed: Vec<f64>,
    /// Level of `alpha` on `[t_k, t_{k+1})`.
    pub levels: Vec<f64>,
    skew: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BalanceMode {
    /// Skew-symmetric `A`: the energy identity holds with equality.
    Equality,
    /// Dissipative `A`: only `V(t) - V(0) + int <= 0` is expected.
    Inequality,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBalance {
    pub mode: BalanceMode,
    /// Equality mode: `max |V(t) - V(0) + int_0^t alpha ||B^* z||^2|`.
    /// Inequality mode: `max (V(t) - V(0) + int_0^t alpha ||B^* z||^2)^+`.
    pub residual: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DVector<f64> {
        self.states
            .last()
            .expect("trajectory has at least the initial sample")
    }

    /// Largest increase `V(t_{k+1}) - V(t_k)` over consecutive samples (<= 0 for exact decay).
    pub fn max_energy_increase(&self) -> f64 {
        self.energies
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Cumulative cell-aligned trapezoid of `alpha ||B^* z||^2`.
    pub fn dissipated(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.len());
        out.push(0.0);
        for k in 0..self.levels.len() {
            let h = self.times[k + 1] - self.times[k];
            acc += self.levels[k] * 0.5 * (self.observed[k] + self.observed[k + 1]) * h;
            out.push(acc);
        }
        out
    }

    /// Residual of the energy law along the samples.
    pub fn energy_balance(&self) -> EnergyBalance {
        let v0 = self.energies[0];
        let diss = self.dissipated();
        let defects = self.energies.iter().zip(&diss).map(|(v, d)| v - v0 + d);
        if self.skew {
            EnergyBalance {
                mode: BalanceMode::Equality,
                residual: defects.map(f64::abs).fold(0.0, f64::max),
            }
        } else {
            EnergyBalance {
                mode: BalanceMode::Inequality,
                residual: defects.fold(0.0, f64::max),
            }
        }
    }

    /// CSV with header `t,V,damping_rate` and, if requested, `z0,z1,...` columns.
    pub fn write_csv<W: Write>(&self, mut out: W, with_state: bool) -> std::io::Result<()> {
        write!(out, "t,V,damping_rate")?;
        if with_state {
            for i in 0..self.states[0].len() {
                write!(out, ",z{i}")?;
            }
        }
        writeln!(out)?;
        for k in 0..self.len() {
            write!(
                out,
                "{},{},{}",
                self.times[k], self.energies[k], self.damping_rate_samples[k]
            )?;
            if with_state {
                for x in self.states[k].iter() {
                    write!(out, ",{x}")?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator() -> LinearSystem {
        LinearSystem::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
            DMatrix::from_column_slice(2, 1, &[0.0, 1.0]),
        )
        .unwrap()
    }

    #[test]
    fn construction_checks() {
        let anti = DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, -1.0]);
        assert!(matches!(
            LinearSystem::new(anti, DMatrix::zeros(2, 1)),
            Err(Error::NotDissipative { .. })
        ));
        assert!(LinearSystem::new(DMatrix::zeros(2, 3), DMatrix::zeros(2, 1)).is_err());
        assert!(LinearSystem::new(DMatrix::zeros(2, 2), DMatrix::zeros(3, 1)).is_err());
        assert!(matches!(
            LinearSystem::with_dim_limit(DMatrix::zeros(4, 4), DMatrix::zeros(4, 1), 3),
            Err(Error::DimensionLimit { dim: 4, limit: 3 })
        ));
        let sys = oscillator();
        assert!(sys.is_skew());
        assert!((sys.b_norm() - 1.0).abs() < 1e-15);
        let damped = LinearSystem::new(
            DMatrix::from_row_slice(2, 2, &[-0.5, 1.0, -1.0, 0.0]),
            DMatrix::identity(2, 2) * 2.0,
        )
        .unwrap();
        assert!(!damped.is_skew());
        assert!((damped.b_norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn undamped_norm_preserved() {
        let sys = oscillator();
        let z0 = DVector::from_vec(vec![0.3, -1.2]);
        let traj = sys
            .simulate(&Signal::constant(0.0).unwrap(), &z0, 20.0, 0.05)
            .unwrap();
        for z in &traj.states {
            assert!((z.norm() - z0.norm()).abs() < 1e-10);
        }
        let no_input = LinearSystem::new(sys.a().clone(), DMatrix::zeros(2, 1)).unwrap();
        let traj = no_input
            .simulate(&Signal::constant(1.0).unwrap(), &z0, 5.0, 0.5)
            .unwrap();
        for (t, z) in traj.times.iter().zip(&traj.states) {
            let expect = sys.free_flow(*t) * &z0;
            assert!((z - expect).amax() < 1e-12);
        }
    }

    #[test]
    fn damped_oscillator_decay_rate() {
        let sys = oscillator();
        let z0 = DVector::from_vec(vec![1.0, 0.0]);
        let traj = sys
            .simulate(&Signal::constant(1.0).unwrap(), &z0, 30.0, 0.01)
            .unwrap();
        // ||z|| ~ e^{-t/2}, so V(t + 10)/V(t) ~ e^{-10} up to oscillation.
        let n = traj.len();
        let ratio = traj.energies[n - 1] / traj.energies[n - 1001];
        assert!((ratio.ln() + 10.0).abs() < 1.0, "ln ratio {}", ratio.ln());
    }

    #[test]
    fn energy_balance_modes() {
        let sys = oscillator();
        let z0 = DVector::from_vec(vec![1.0, 0.0]);
        let zero = sys
            .simulate(&Signal::constant(0.0).unwrap(), &z0, 10.0, 1e-2)
            .unwrap();
        let bal = zero.energy_balance();
        assert_eq!(bal.mode, BalanceMode::Equality);
        assert!(bal.residual <= 1e-10);

        let one = sys
            .simulate(&Signal::constant(1.0).unwrap(), &z0, 10.0, 1e-3)
            .unwrap();
        assert!(one.energy_balance().residual <= 1e-5);

        let lossy = LinearSystem::new(
            DMatrix::from_row_slice(2, 2, &[-0.3, 1.0, -1.0, -0.1]),
            DMatrix::from_column_slice(2, 1, &[0.0, 1.0]),
        )
        .unwrap();
        let traj = lossy
            .simulate(
                &Signal::periodic_gate(2.0, 0.4, 10.0).unwrap(),
                &z0,
                10.0,
                1e-3,
            )
            .unwrap();
        let bal = traj.energy_balance();
        assert_eq!(bal.mode, BalanceMode::Inequality);
        assert!(bal.residual <= 1e-9);
    }

    #[test]
    fn cells_are_exact() {
        let sys = oscillator();
        let z0 = DVector::from_vec(vec![0.2, 0.9]);
        let traj = sys
            .simulate(&Signal::constant(0.7).unwrap(), &z0, 4.0, 0.1)
            .unwrap();
        let direct = (sys.closed_loop(0.7) * 4.0).exp() * &z0;
        let err = (traj.final_state() - &direct).norm() / direct.norm();
        assert!(err < 1e-10, "relative error {err}");
    }

    #[test]
    fn breakpoints_become_samples() {
        let sys = oscillator();
        let sig = Signal::piecewise(vec![0.25, 1.33], vec![1.0, 0.0], 0.5).unwrap();
        let traj = sys
            .simulate(&sig, &DVector::from_vec(vec![1.0, 1.0]), 2.0, 0.5)
            .unwrap();
        assert_eq!(traj.times, vec![0.0, 0.25, 0.5, 1.0, 1.33, 1.5, 2.0]);
        assert_eq!(traj.levels, vec![1.0, 0.0, 0.0, 0.0, 0.5, 0.5]);
    }

    #[test]
    fn kalman_index_examples() {
        assert_eq!(oscillator().kalman_index().unwrap(), 1);
        let square = LinearSystem::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]),
        )
        .unwrap();
        assert_eq!(square.kalman_index().unwrap(), 0);
        let stuck = LinearSystem::new(
            DMatrix::zeros(2, 2),
            DMatrix::from_column_slice(2, 1, &[1.0, 0.0]),
        )
        .unwrap();
        assert!(matches!(
            stuck.kalman_index(),
            Err(Error::Uncontrollable { rank: 1, dim: 2 })
        ));
    }

    #[test]
    fn gap_estimate_examples() {
        let sys = oscillator();
        let z0 = DVector::from_vec(vec![1.0, 0.0]);
        let off = Signal::constant(0.0).unwrap();
        let g = sys.gap_estimate_check(&off, &z0, 0.5, 2.0).unwrap();
        assert!(g.ok);
        assert!(g.rhs == 0.0 && g.lhs.abs() < 1e-14);

        let on = Signal::constant(1.0).unwrap();
        let g = sys.gap_estimate_check(&on, &z0, 0.0, 1.0).unwrap();
        assert!(g.ok);
        assert!(g.margin > 1e-3, "margin {}", g.margin);
    }

    #[test]
    fn gap_estimate_rhs_matches_fine_trapezoid() {
        // Independent oracle: plain trapezoid of the undamped output at dt = 1e-4.
        let sys = oscillator();
        let z0 = DVector::from_vec(vec![1.0, 0.0]);
        let on = Signal::constant(1.0).unwrap();
        let g = sys.gap_estimate_check(&on, &z0, 0.0, 1.0).unwrap();
        let n = 10_000;
        let f = |t: f64| {
            // B^T e^{tA} z0 = second component of the rotated state = -sin t.
            t.sin().powi(2)
        };
        let h = 1.0 / n as f64;
        let trap: f64 = (0..n)
            .map(|k| 0.5 * h * (f(k as f64 * h) + f((k + 1) as f64 * h)))
            .sum();
        let rhs = -trap / 4.0;
        assert!((g.rhs - rhs).abs() < 1e-8, "{} vs {}", g.rhs, rhs);
    }
}
