//! Piecewise-constant damping signals `alpha: [0, inf) -> [0, 1]`.
//!
//! A [`Signal`] stores strictly increasing breakpoints `t_1 < ... < t_m`, one level per
//! cell `[t_{i-1}, t_i)` (with `t_0 = 0`) and a tail level on `[t_m, inf)`. Adjacent cells
//! with equal levels are merged on construction, so the stored breakpoints are exactly
//! the jump points of the signal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SignalLiteral", into = "SignalLiteral")]
pub struct Signal {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    tail: f64,
}

/// Wire form of a signal: `{ "breakpoints": [...], "values": [...], "tail": v }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalLiteral {
    #[serde(default)]
    pub breakpoints: Vec<f64>,
    #[serde(default)]
    pub values: Vec<f64>,
    pub tail: f64,
}

impl TryFrom<SignalLiteral> for Signal {
    type Error = Error;

    fn try_from(lit: SignalLiteral) -> Result<Self> {
        Signal::piecewise(lit.breakpoints, lit.values, lit.tail)
    }
}

impl From<Signal> for SignalLiteral {
    fn from(sig: Signal) -> Self {
        SignalLiteral {
            breakpoints: sig.breakpoints,
            values: sig.values,
            tail: sig.tail,
        }
    }
}

fn check_level(v: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidSignal(format!("{what} {v} outside [0, 1]")));
    }
    Ok(())
}

impl Signal {
    /// Builds a signal from its cells. `values[i]` holds on `[breakpoints[i-1], breakpoints[i])`
    /// where the first cell starts at 0; `tail` holds after the last breakpoint.
    pub fn piecewise(breakpoints: Vec<f64>, values: Vec<f64>, tail: f64) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidSignal(format!(
                "{} breakpoints but {} cell values",
                breakpoints.len(),
                values.len()
            )));
        }
        let mut prev = 0.0;
        for (i, &b) in breakpoints.iter().enumerate() {
            if !b.is_finite() {
                return Err(Error::InvalidSignal(format!(
                    "breakpoint {i} is not finite"
                )));
            }
            if b <= prev {
                return Err(Error::InvalidSignal(format!(
                    "breakpoint {i} = {b} does not exceed the previous cell start {prev} (cells must have positive length)"
                )));
            }
            prev = b;
        }
        for &v in &values {
            check_level(v, "level")?;
        }
        check_level(tail, "tail level")?;
        Ok(Self::merged(breakpoints, values, tail))
    }

    /// `alpha == level` for all times.
    pub fn constant(level: f64) -> Result<Self> {
        Self::piecewise(Vec::new(), Vec::new(), level)
    }

    // Drops breakpoints between cells of equal level. Inputs are assumed valid.
    fn merged(breakpoints: Vec<f64>, values: Vec<f64>, tail: f64) -> Self {
        let mut bps = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        for (i, (&b, &v)) in breakpoints.iter().zip(&values).enumerate() {
            let next = values.get(i + 1).copied().unwrap_or(tail);
            if next == v {
                continue;
            }
            bps.push(b);
            vals.push(v);
        }
        Signal {
            breakpoints: bps,
            values: vals,
            tail,
        }
    }

    /// Builds a signal from disjoint, sorted segments `(start, end, level)`; the signal is 0
    /// outside the segments and `tail` after `tail_from` (which must not precede the last segment end).
    fn from_segments(segments: &[(f64, f64, f64)], tail: f64, tail_from: f64) -> Result<Self> {
        let mut bps = Vec::new();
        let mut vals = Vec::new();
        let mut cursor = 0.0;
        for &(a, b, level) in segments {
            if a < cursor || b <= a {
                return Err(Error::InvalidSignal(format!(
                    "segment ({a}, {b}) overlaps or is empty"
                )));
            }
            if a > cursor {
                bps.push(a);
                vals.push(0.0);
            }
            bps.push(b);
            vals.push(level);
            cursor = b;
        }
        if tail_from > cursor {
            bps.push(tail_from);
            vals.push(0.0);
        }
        Self::piecewise(bps, vals, tail)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Index of the cell containing `t` (cells are right-open).
    fn cell_index(&self, t: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= t)
    }

    fn cell_level(&self, i: usize) -> f64 {
        self.values.get(i).copied().unwrap_or(self.tail)
    }

    fn cell_end(&self, i: usize) -> f64 {
        self.breakpoints.get(i).copied().unwrap_or(f64::INFINITY)
    }

    /// Value of the signal at `t >= 0`.
    pub fn eval(&self, t: f64) -> f64 {
        self.cell_level(self.cell_index(t))
    }

    /// Maximal constant pieces of the signal restricted to `[a, b]` as `(start, end, level)`.
    pub fn pieces(&self, a: f64, b: f64) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        if b <= a {
            return out;
        }
        let mut i = self.cell_index(a);
        let mut start = a;
        loop {
            let end = self.cell_end(i).min(b);
            out.push((start, end, self.cell_level(i)));
            if end >= b {
                break;
            }
            start = end;
            i += 1;
        }
        out
    }

    fn mass(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        let mut i = self.cell_index(a);
        let mut start = a;
        while start < b {
            let end = self.cell_end(i).min(b);
            total += (end - start) * self.cell_level(i);
            start = end;
            i += 1;
        }
        total
    }

    /// `int_a^b alpha(s) ds`, summed cell by cell.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        if !(a >= 0.0 && b.is_finite()) {
            return Err(Error::arg(
                "a",
                format!("window ({a}, {b}) must satisfy 0 <= a, b finite"),
            ));
        }
        if a > b {
            return Err(Error::arg("a", format!("a = {a} exceeds b = {b}")));
        }
        Ok(self.mass(a, b))
    }

    /// The shifted signal `alpha(t0 + .)`.
    pub fn shifted(&self, t0: f64) -> Signal {
        let i = self.cell_index(t0);
        let bps: Vec<f64> = self.breakpoints[i..].iter().map(|&b| b - t0).collect();
        let vals = self.values[i..].to_vec();
        // Rounding can collapse a breakpoint onto 0; its cell then has zero length.
        let (bps, vals): (Vec<f64>, Vec<f64>) =
            bps.into_iter().zip(vals).filter(|(b, _)| *b > 0.0).unzip();
        Self::merged(bps, vals, self.tail)
    }

    /// Exact check of the persistent-excitation condition
    /// `int_t^{t+T} alpha >= mu` for every window start `t in [0, horizon - T]`.
    ///
    /// The window mass is piecewise linear in `t` with kinks where either window edge
    /// crosses a breakpoint, so its minimum is attained on the finite candidate set
    /// `{0, horizon - T} u {t_i} u {t_i - T}`.
    pub fn pe_check(&self, window: f64, mu: f64, horizon: f64) -> Result<PeReport> {
        if !(window > 0.0 && window.is_finite()) {
            return Err(Error::arg(
                "T",
                format!("window length {window} must be positive"),
            ));
        }
        if !(mu > 0.0 && mu <= window) {
            return Err(Error::arg(
                "mu",
                format!("mu = {mu} must lie in (0, T = {window}]"),
            ));
        }
        if !(horizon >= window && horizon.is_finite()) {
            return Err(Error::arg(
                "horizon",
                format!("horizon {horizon} shorter than T = {window}"),
            ));
        }
        let last = horizon - window;
        let mut candidates = vec![0.0, last];
        for &b in &self.breakpoints {
            for c in [b, b - window] {
                if (0.0..=last).contains(&c) {
                    candidates.push(c);
                }
            }
        }
        candidates.sort_by(f64::total_cmp);
        candidates.dedup();

        let mut worst_start = 0.0;
        let mut worst_mass = f64::INFINITY;
        for &t in &candidates {
            let m = self.mass(t, t + window);
            if m < worst_mass {
                worst_mass = m;
                worst_start = t;
            }
        }
        Ok(PeReport {
            holds: worst_mass >= mu,
            window,
            mu,
            horizon,
            worst_window_start: worst_start,
            worst_window_mass: worst_mass,
        })
    }

    /// `alpha = 1` on `[k period - h, k period + h)` for every `k >= 0` (clipped at 0), 0
    /// elsewhere. Pulses are generated while they start before `horizon`; the signal is 0
    /// after the last generated pulse. `h = period / 2` gives `alpha == 1`.
    pub fn periodic_gate(period: f64, halfwidth: f64, horizon: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::arg(
                "period",
                format!("period {period} must be positive"),
            ));
        }
        if !(halfwidth > 0.0 && halfwidth <= period / 2.0) {
            return Err(Error::arg(
                "halfwidth",
                format!("halfwidth {halfwidth} must lie in (0, period/2]"),
            ));
        }
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::arg(
                "horizon",
                format!("horizon {horizon} must be finite and >= 0"),
            ));
        }
        if halfwidth == period / 2.0 {
            return Self::constant(1.0);
        }
        let mut segments = vec![(0.0, halfwidth, 1.0)];
        let mut k = 1.0;
        loop {
            let centre = k * period;
            if centre - halfwidth >= horizon {
                break;
            }
            segments.push((centre - halfwidth, centre + halfwidth, 1.0));
            k += 1.0;
        }
        Self::from_segments(&segments, 0.0, 0.0)
    }

    /// Level `level` on each interval, 0 elsewhere (including the tail).
    pub fn from_intervals(intervals: &[(f64, f64)], level: f64) -> Result<Self> {
        if !(level > 0.0 && level <= 1.0) {
            return Err(Error::arg(
                "level",
                format!("level {level} must lie in (0, 1]"),
            ));
        }
        check_intervals(intervals)?;
        let segments: Vec<_> = intervals.iter().map(|&(a, b)| (a, b, level)).collect();
        Self::from_segments(&segments, 0.0, 0.0)
    }

    /// Signal equal to 1 on `I_n = (s_n, s_n + 1/n)`, `s_n = sum_{k<n} 2/k`, for
    /// `n = 1..=n_max`, together with the interval sequence (`rho = 1`).
    pub fn haraux_gap(n_max: usize) -> Result<(Signal, IntervalSequence)> {
        if n_max == 0 {
            return Err(Error::arg("n_max", "at least one interval is required"));
        }
        let mut intervals = Vec::with_capacity(n_max);
        let mut s = 0.0;
        for n in 1..=n_max {
            let len = 1.0 / n as f64;
            intervals.push((s, s + len));
            s += 2.0 / n as f64;
        }
        let seq = IntervalSequence::new(intervals, 1.0)?;
        let sig = Signal::from_intervals(&seq.intervals, 1.0)?;
        Ok((sig, seq))
    }
}

/// Result of [`Signal::pe_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeReport {
    pub holds: bool,
    #[serde(rename = "T")]
    pub window: f64,
    pub mu: f64,
    pub horizon: f64,
    pub worst_window_start: f64,
    pub worst_window_mass: f64,
}

fn check_intervals(intervals: &[(f64, f64)]) -> Result<()> {
    let mut prev_end = 0.0;
    for (n, &(a, b)) in intervals.iter().enumerate() {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidIntervals(format!(
                "interval {n} is not finite"
            )));
        }
        if b <= a {
            return Err(Error::InvalidIntervals(format!(
                "interval {n} = ({a}, {b}) is empty"
            )));
        }
        if a < prev_end {
            return Err(Error::InvalidIntervals(format!(
                "interval {n} = ({a}, {b}) overlaps its predecessor or starts before 0"
            )));
        }
        prev_end = b;
    }
    Ok(())
}

/// Ordered disjoint excitation intervals `(a_n, b_n)` with excitation fraction `rho` and
/// optional per-interval observability costs `c_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSequence {
    pub intervals: Vec<(f64, f64)>,
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<Vec<f64>>,
}

impl IntervalSequence {
    pub fn new(intervals: Vec<(f64, f64)>, rho: f64) -> Result<Self> {
        check_intervals(&intervals)?;
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::arg("rho", format!("rho = {rho} must lie in (0, 1]")));
        }
        Ok(IntervalSequence {
            intervals,
            rho,
            costs: None,
        })
    }

    /// Attaches costs; they must be nonnegative and one per interval.
    pub fn with_costs(mut self, costs: Vec<f64>) -> Result<Self> {
        if costs.len() != self.intervals.len() {
            return Err(Error::InvalidIntervals(format!(
                "{} costs for {} intervals",
                costs.len(),
                self.intervals.len()
            )));
        }
        if let Some((n, c)) = costs
            .iter()
            .enumerate()
            .find(|(_, c)| !(**c >= 0.0 && c.is_finite()))
        {
            return Err(Error::InvalidIntervals(format!(
                "cost {n} = {c} must be finite and >= 0"
            )));
        }
        self.costs = Some(costs);
        Ok(self)
    }

    /// Checks the necessary bound `c_n <= (b_n - a_n) ||B^*||^2`.
    pub fn check_cost_bounds(&self, b_norm: f64) -> Result<()> {
        if let Some(costs) = &self.costs {
            for (n, (&c, &(a, b))) in costs.iter().zip(&self.intervals).enumerate() {
                let bound = (b - a) * b_norm * b_norm;
                if c > bound * (1.0 + 1e-12) {
                    return Err(Error::CostBound {
                        index: n,
                        cost: c,
                        bound,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.intervals.iter().map(|&(a, b)| b - a)
    }

    pub fn to_signal(&self, level: f64) -> Result<Signal> {
        Signal::from_intervals(&self.intervals, level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_min(sig: &Signal, window: f64, horizon: f64) -> f64 {
        let step = 1e-3 * window;
        let n = ((horizon - window) / step).floor() as usize;
        (0..=n)
            .map(|k| {
                sig.integral(k as f64 * step, k as f64 * step + window)
                    .unwrap()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn constant_and_two_cell() {
        let one = Signal::piecewise(vec![], vec![], 1.0).unwrap();
        assert_eq!(one.eval(0.0), 1.0);
        assert_eq!(one.eval(123.0), 1.0);

        let two = Signal::piecewise(vec![1.0], vec![0.0], 1.0).unwrap();
        assert_eq!(two.eval(0.0), 0.0);
        assert_eq!(two.eval(0.999), 0.0);
        assert_eq!(two.eval(1.0), 1.0);
        assert_eq!(two.eval(5.0), 1.0);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(Signal::piecewise(vec![0.2, 0.2], vec![1.0, 0.0], 1.0).is_err());
        assert!(Signal::piecewise(vec![0.5, 0.2], vec![1.0, 0.0], 1.0).is_err());
        assert!(Signal::piecewise(vec![0.0], vec![1.0], 0.0).is_err());
        assert!(Signal::piecewise(vec![1.0], vec![1.5], 0.0).is_err());
        assert!(Signal::piecewise(vec![1.0], vec![0.5], -0.1).is_err());
        assert!(Signal::piecewise(vec![1.0], vec![], 0.0).is_err());
    }

    #[test]
    fn equal_cells_are_merged() {
        let s = Signal::piecewise(vec![1.0, 2.0, 3.0], vec![0.5, 0.5, 1.0], 1.0).unwrap();
        assert_eq!(s.breakpoints(), &[2.0]);
        assert_eq!(s.values(), &[0.5]);
    }

    #[test]
    fn integrals() {
        let one = Signal::constant(1.0).unwrap();
        assert_eq!(one.integral(0.0, 2.0).unwrap(), 2.0);

        let gate = Signal::periodic_gate(2.0, 0.2, 20.0).unwrap();
        assert!((gate.integral(0.0, 2.0).unwrap() - 0.4).abs() < 1e-15);

        let two = Signal::piecewise(vec![1.0], vec![0.0], 1.0).unwrap();
        assert!((two.integral(0.5, 1.5).unwrap() - 0.5).abs() < 1e-15);

        assert!(two.integral(2.0, 1.0).is_err());
    }

    #[test]
    fn pe_check_examples() {
        let one = Signal::constant(1.0).unwrap();
        let r = one.pe_check(2.0, 1.0, 10.0).unwrap();
        assert!(r.holds);
        assert_eq!(r.worst_window_mass, 2.0);

        let gate = Signal::periodic_gate(2.0, 0.2, 20.0).unwrap();
        let r = gate.pe_check(2.0, 0.2, 20.0).unwrap();
        assert!(r.holds);
        assert!((r.worst_window_mass - 0.4).abs() < 1e-14);

        let late = Signal::piecewise(vec![5.0], vec![0.0], 1.0).unwrap();
        let r = late.pe_check(2.0, 0.1, 10.0).unwrap();
        assert!(!r.holds);
        assert_eq!(r.worst_window_start, 0.0);
        assert_eq!(r.worst_window_mass, 0.0);

        assert!(one.pe_check(2.0, 1.0, 1.0).is_err());
        assert!(one.pe_check(2.0, 3.0, 10.0).is_err());
    }

    #[test]
    fn periodic_gate_examples() {
        let g = Signal::periodic_gate(2.0, 0.2, 10.0).unwrap();
        assert_eq!(g.eval(0.1), 1.0);
        assert_eq!(g.eval(1.0), 0.0);
        assert_eq!(g.eval(1.81), 1.0);
        assert_eq!(g.eval(2.19), 1.0);
        assert_eq!(g.eval(2.2), 0.0);

        let full = Signal::periodic_gate(2.0, 1.0, 10.0).unwrap();
        assert!(full.breakpoints().is_empty());
        assert_eq!(full.tail(), 1.0);

        assert!(Signal::periodic_gate(0.0, 0.1, 1.0).is_err());
        assert!(Signal::periodic_gate(2.0, 1.5, 1.0).is_err());
    }

    #[test]
    fn haraux_gap_examples() {
        let (_, seq) = Signal::haraux_gap(2).unwrap();
        assert_eq!(seq.intervals, vec![(0.0, 1.0), (2.0, 2.5)]);
        assert_eq!(seq.rho, 1.0);
        let (sig, seq) = Signal::haraux_gap(1).unwrap();
        assert_eq!(seq.intervals, vec![(0.0, 1.0)]);
        assert_eq!(sig.eval(0.5), 1.0);
        assert_eq!(sig.eval(1.5), 0.0);
    }

    #[test]
    fn haraux_window_mass_far_out() {
        // Interval n has length 1/n and is followed by a gap of 1/n: duty cycle 1/2, so a
        // window of length 2 carries mass close to 1 once enough intervals exist.
        let (sig, seq) = Signal::haraux_gap(400).unwrap();
        let s100 = seq.intervals[99].0;
        let m = sig.integral(s100, s100 + 2.0).unwrap();
        assert!((m - 1.0).abs() < 0.01, "mass {m}");
    }

    #[test]
    fn from_intervals_examples() {
        let s = Signal::from_intervals(&[(0.0, 1.0)], 1.0).unwrap();
        assert_eq!(s.eval(0.0), 1.0);
        assert_eq!(s.eval(1.0), 0.0);

        let s = Signal::from_intervals(&[(0.5, 1.5), (3.0, 3.25)], 0.5).unwrap();
        assert!((s.integral(0.5, 1.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((s.integral(3.0, 3.25).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(s.integral(0.0, 10.0).unwrap(), 0.625);

        assert!(Signal::from_intervals(&[(0.0, 1.0), (0.5, 2.0)], 1.0).is_err());
    }

    #[test]
    fn interval_sequence_cost_bound() {
        let seq = IntervalSequence::new(vec![(0.0, 1.0), (2.0, 4.0)], 0.5)
            .unwrap()
            .with_costs(vec![0.5, 2.5])
            .unwrap();
        assert!(matches!(
            seq.check_cost_bounds(1.0),
            Err(Error::CostBound { index: 1, .. })
        ));
        assert!(seq.check_cost_bounds(1.2).is_ok());
        assert!(IntervalSequence::new(vec![(0.0, 1.0)], 0.0).is_err());
    }

    #[test]
    fn shifted_signal() {
        let g = Signal::periodic_gate(2.0, 0.2, 10.0).unwrap();
        let s = g.shifted(1.9);
        assert_eq!(s.eval(0.0), 1.0);
        assert_eq!(s.eval(0.29), 1.0);
        assert_eq!(s.eval(0.31), 0.0);
    }

    #[test]
    fn gate_with_halfwidth_mu_is_pe() {
        for &mu in &[0.05, 0.2, 0.5, 0.9] {
            let g = Signal::periodic_gate(2.0, mu, 8.0).unwrap();
            let r = g.pe_check(2.0, mu, 8.0).unwrap();
            assert!(r.holds, "mu = {mu}: {r:?}");
        }
    }

    #[test]
    fn haraux_gap_pe_membership() {
        let (sig, seq) = Signal::haraux_gap(400).unwrap();
        let horizon = seq.intervals[99].1;
        assert!(sig.pe_check(2.0, 0.3, horizon).unwrap().holds);
        let far = seq.intervals[300].0;
        assert!(!sig.pe_check(2.0, 1.05, far).unwrap().holds);
    }

    #[test]
    fn pe_check_matches_brute_force_on_generators() {
        let (haraux, _) = Signal::haraux_gap(20).unwrap();
        let sigs = [
            Signal::periodic_gate(2.0, 0.2, 12.0).unwrap(),
            Signal::periodic_gate(1.3, 0.31, 12.0).unwrap(),
            haraux,
            Signal::piecewise(vec![0.7, 1.1, 4.0], vec![0.3, 1.0, 0.0], 0.6).unwrap(),
        ];
        for sig in &sigs {
            for &t in &[0.5, 2.0, 3.3] {
                let exact = sig.pe_check(t, 0.01, 12.0).unwrap();
                let brute = brute_force_min(sig, t, 12.0);
                assert!(exact.worst_window_mass <= brute + 1e-12);
                assert!(brute - exact.worst_window_mass <= 2.0 * 1e-3 * t);
            }
        }
    }
}
