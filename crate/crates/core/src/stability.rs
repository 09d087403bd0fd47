//! Decay certificates and their verification against simulation.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::linsys::{LinearSystem, Trajectory};
use crate::observability::{self, OuterSearch, SignalClass};
use crate::signals::{IntervalSequence, Signal};

/// How `(M, gamma)` follow from `q`; stored in every certificate.
pub const CERTIFICATE_DERIVATION: &str =
    "V(s + theta) <= q V(s) for every s and V is nonincreasing, \
so V(t) <= q^floor(t/theta) V(0) <= q^(-1) q^(t/theta) V(0); taking square roots gives \
|z(t)| <= M exp(-gamma t) |z0| with M = q^(-1/2), gamma = ln(1/q) / (2 theta). \
This is one valid choice of constants, not the only one.";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCertificate {
    pub c: f64,
    pub q: f64,
    pub theta: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub gamma: f64,
    pub source: String,
    pub derivation: &'static str,
}

/// `q = 1 - c / (1 + theta^2 |B|^4)`, `gamma = ln(1/q) / (2 theta)`, `M = q^{-1/2}`.
pub fn certificate_from_constant(c: f64, theta: f64, b_norm: f64) -> Result<DecayCertificate> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::arg(
            "theta",
            format!("theta = {theta} must be positive"),
        ));
    }
    let max = 1.0 + theta * theta * b_norm.powi(4);
    if !(c > 0.0 && c < max) {
        return Err(Error::ConstantOutOfRange { c, max });
    }
    let q = 1.0 - c / max;
    Ok(DecayCertificate {
        c,
        q,
        theta,
        m: q.powf(-0.5),
        gamma: (1.0 / q).ln() / (2.0 * theta),
        source: "explicit constant".into(),
        derivation: CERTIFICATE_DERIVATION,
    })
}

impl DecayCertificate {
    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    /// `M e^{-gamma t}`.
    pub fn envelope(&self, t: f64) -> f64 {
        self.m * (-self.gamma * t).exp()
    }
}

/// Random signals in the `T`-`mu` PE class on `[0, horizon]`.
///
/// Time is cut into cells of length `T/m`; each cell carries one unit pulse of width
/// `mu/(m-1)` at a random offset. A window of length `T` contains `m-1` whole cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeFamily {
    #[serde(rename = "T")]
    pub t: f64,
    pub mu: f64,
}

impl PeFamily {
    pub fn new(t: f64, mu: f64) -> Result<Self> {
        if !(t > 0.0 && mu > 0.0 && mu <= t) {
            return Err(Error::Infeasible(format!(
                "need 0 < mu <= T, got T = {t}, mu = {mu}"
            )));
        }
        Ok(PeFamily { t, mu })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R, horizon: f64) -> Result<Signal> {
        if self.mu >= self.t {
            return Signal::constant(1.0);
        }
        // (m - 1) / m >= mu / T
        let m_min = ((self.t / (self.t - self.mu)).ceil() as usize).max(2);
        let m = rng.random_range(m_min..m_min + 4);
        let cell = self.t / m as f64;
        // A hair above the exact width keeps windows holding exactly m-1 cells at mass >= mu.
        let width = (self.mu / (m - 1) as f64 * (1.0 + 1e-9)).min(cell);
        let n_cells = (horizon / cell).ceil() as usize + 1;
        let mut intervals = Vec::with_capacity(n_cells);
        for k in 0..n_cells {
            let start = k as f64 * cell + rng.random_range(0.0..=(cell - width));
            intervals.push((start, start + width));
        }
        // Touching pulses are merged so the interval list stays strictly ordered.
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Signal::from_intervals(&merged, 1.0)
    }
}

/// `sig` on `[0, period)` repeated up to `horizon`, zero afterwards.
pub fn periodic_repeat(sig: &Signal, period: f64, horizon: f64) -> Result<Signal> {
    if !(period > 0.0) {
        return Err(Error::arg("period", "must be positive"));
    }
    let base = sig.pieces(0.0, period);
    let mut bps = Vec::new();
    let mut vals = Vec::new();
    let reps = (horizon / period).ceil().max(1.0) as usize;
    for k in 0..reps {
        let off = k as f64 * period;
        for &(_, hi, level) in &base {
            bps.push(off + hi);
            vals.push(level);
        }
    }
    Signal::piecewise(bps, vals, 0.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialOutcome {
    pub index: usize,
    pub pe_ok: bool,
    /// `min_t (M e^{-gamma t} (1 + 1e-6) - |z(t)|/|z0|)`.
    pub margin: f64,
    pub worst_time: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateCheck {
    pub certificate: DecayCertificate,
    pub trials: Vec<TrialOutcome>,
    pub worst_margin: f64,
    pub passed: bool,
    pub seed: u64,
    pub horizon: f64,
}

/// Relative slack allowed on the envelope.
pub const ENVELOPE_SLACK: f64 = 1e-6;

fn run_trial(
    sys: &LinearSystem,
    cert: &DecayCertificate,
    sig: &Signal,
    z0: &DVector<f64>,
    horizon: f64,
    dt_out: f64,
) -> Result<(f64, f64)> {
    let traj = sys.simulate(sig, z0, horizon, dt_out)?;
    let n0 = z0.norm();
    let mut margin = f64::INFINITY;
    let mut worst = 0.0;
    for (t, z) in traj.times.iter().zip(&traj.states) {
        let m = cert.envelope(*t) * (1.0 + ENVELOPE_SLACK) - z.norm() / n0;
        if m < margin {
            margin = m;
            worst = *t;
        }
    }
    Ok((margin, worst))
}

/// Simulates `n_trials` random `(z0, signal)` pairs (the first uses `alpha = 1`) plus any
/// `extra` pairs, and checks `|z(t)| <= M e^{-gamma t} |z0| (1 + 1e-6)` at every sample.
#[allow(clippy::too_many_arguments)]
pub fn verify_certificate(
    sys: &LinearSystem,
    cert: &DecayCertificate,
    family: &PeFamily,
    n_trials: usize,
    horizon: f64,
    dt_out: f64,
    seed: u64,
    extra: &[(Signal, DVector<f64>)],
) -> Result<CertificateCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trials: Vec<(Signal, DVector<f64>)> = Vec::with_capacity(n_trials + extra.len());
    for k in 0..n_trials {
        let sig = if k == 0 {
            Signal::constant(1.0)?
        } else {
            family.sample(&mut rng, horizon)?
        };
        let z0 = DVector::from_fn(sys.dim(), |_, _| rng.random_range(-1.0..1.0));
        trials.push((sig, z0));
    }
    trials.extend(extra.iter().cloned());
    let outcomes: Vec<TrialOutcome> = trials
        .par_iter()
        .enumerate()
        .map(|(index, (sig, z0))| {
            let pe_ok = sig.pe_check(family.t, family.mu, horizon)?.holds;
            let (margin, worst_time) = run_trial(sys, cert, sig, z0, horizon, dt_out)?;
            Ok(TrialOutcome {
                index,
                pe_ok,
                margin,
                worst_time,
            })
        })
        .collect::<Result<_>>()?;
    let worst_margin = outcomes
        .iter()
        .map(|o| o.margin)
        .fold(f64::INFINITY, f64::min);
    Ok(CertificateCheck {
        certificate: cert.clone(),
        passed: worst_margin >= 0.0,
        trials: outcomes,
        worst_margin,
        seed,
        horizon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub gamma_hat: f64,
    pub r_squared: f64,
    pub samples: usize,
    /// `V` reached 0 inside the tail; `gamma_hat` is then `+inf`.
    pub vanished: bool,
}

/// Least-squares slope of `ln V` over the last `tail_fraction` of samples; `gamma_hat = -slope/2`.
pub fn decay_rate_fit(traj: &Trajectory, tail_fraction: f64) -> Result<DecayFit> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::arg("tail_fraction", "must lie in (0, 1]"));
    }
    let n = traj.len();
    let start = n - ((n as f64 * tail_fraction).ceil() as usize).min(n);
    let samples = n - start;
    if samples < 10 {
        return Err(Error::arg(
            "tail_fraction",
            format!("only {samples} samples in the tail, need 10"),
        ));
    }
    let tail = &traj.energies[start..];
    if tail.iter().any(|&v| v <= 0.0) {
        return Ok(DecayFit {
            gamma_hat: f64::INFINITY,
            r_squared: 1.0,
            samples,
            vanished: true,
        });
    }
    let x = &traj.times[start..];
    let y: Vec<f64> = tail.iter().map(|v| v.ln()).collect();
    let (slope, _, r2) = observability::linear_fit(x, &y);
    Ok(DecayFit {
        gamma_hat: -slope / 2.0,
        r_squared: r2,
        samples,
        vanished: false,
    })
}

/// Where the per-interval costs `c_n` come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CostSource {
    /// The costs attached to the interval sequence.
    Explicit,
    /// Smallest eigenvalue of the Gramian weighted by the actual signal on each interval.
    SignalGramian,
    /// Class constant of the `rho`-class on each interval length.
    RhoClass {
        n_cells: usize,
        #[serde(default)]
        outer: OuterSearch,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductBoundRow {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub cost: f64,
    pub factor: f64,
    pub cumulative_bound: f64,
    pub partial_sum: f64,
    /// `V(a_{n+1}) / V(a_n)` (with `a_{N+1} = b_N`).
    pub measured_ratio: Option<f64>,
    /// `V(a_{n+1}) / V(0)`.
    pub measured_cumulative: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductBoundReport {
    pub rows: Vec<ProductBoundRow>,
    pub b_norm: f64,
    /// Every measured ratio is within `factor + 1e-8` and every cumulative ratio within the bound.
    pub consistent: bool,
    pub max_ratio_excess: Option<f64>,
}

/// Tolerance on measured versus bounded ratios.
pub const RATIO_TOL: f64 = 1e-8;

/// Interval costs, product factors `1 - c_n / (1 + (b_n - a_n)^2 |B|^4)` and, given a signal and
/// an initial state, the measured energy ratios between interval starts.
pub fn interval_product_bound(
    sys: &LinearSystem,
    seq: &IntervalSequence,
    source: &CostSource,
    sim: Option<(&Signal, &DVector<f64>)>,
) -> Result<ProductBoundReport> {
    let b_norm = sys.b_norm();
    let costs: Vec<f64> = match source {
        CostSource::Explicit => seq
            .costs
            .clone()
            .ok_or_else(|| Error::InvalidIntervals("no costs attached".into()))?,
        CostSource::SignalGramian => {
            let (sig, _) =
                sim.ok_or_else(|| Error::arg("signal", "signal Gramian costs need a signal"))?;
            seq.intervals
                .par_iter()
                .map(|&(a, b)| {
                    let w = observability::signal_gramian(sys, sig, a, b)?;
                    Ok(linalg::min_eigenpair(&w).0.max(0.0))
                })
                .collect::<Result<_>>()?
        }
        CostSource::RhoClass { n_cells, outer } => seq
            .intervals
            .iter()
            .map(|&(a, b)| {
                let class = SignalClass::rho_integral(seq.rho, b - a)?;
                Ok(observability::class_constant(sys, &class, *n_cells, outer)?
                    .c
                    .max(0.0))
            })
            .collect::<Result<_>>()?,
    };
    let seq = seq.clone().with_costs(costs.clone())?;
    seq.check_cost_bounds(b_norm)?;

    let measured: Option<Vec<f64>> = match sim {
        Some((sig, z0)) => {
            let mut energies = vec![0.5 * z0.norm_squared()];
            let mut z = z0.clone();
            let mut t = 0.0;
            let mut marks: Vec<f64> = seq.intervals.iter().map(|iv| iv.0).collect();
            if let Some(last) = seq.intervals.last() {
                marks.push(last.1);
            }
            for &m in &marks {
                z = sys.propagate(sig, &z, t, m)?;
                t = m;
                energies.push(0.5 * z.norm_squared());
            }
            Some(energies)
        }
        None => None,
    };

    let mut rows = Vec::with_capacity(seq.len());
    let mut cumulative = 1.0;
    let mut partial = 0.0;
    let mut consistent = true;
    let mut max_excess: Option<f64> = None;
    for (n, (&(a, b), &c)) in seq.intervals.iter().zip(&costs).enumerate() {
        let len = b - a;
        let factor = 1.0 - c / (1.0 + len * len * b_norm.powi(4));
        cumulative *= factor;
        partial += c;
        let (ratio, cum) = match &measured {
            // energies[0] = V(0), energies[n + 1] = V(a_n), energies[n + 2] = V(a_{n+1}).
            Some(e) => {
                let r = if e[n + 1] > 0.0 {
                    e[n + 2] / e[n + 1]
                } else {
                    0.0
                };
                let cum = if e[0] > 0.0 { e[n + 2] / e[0] } else { 0.0 };
                let excess = r - factor;
                max_excess = Some(max_excess.map_or(excess, |m: f64| m.max(excess)));
                if excess > RATIO_TOL || cum > cumulative + RATIO_TOL {
                    consistent = false;
                }
                (Some(r), Some(cum))
            }
            None => (None, None),
        };
        rows.push(ProductBoundRow {
            n: n + 1,
            a,
            b,
            cost: c,
            factor,
            cumulative_bound: cumulative,
            partial_sum: partial,
            measured_ratio: ratio,
            measured_cumulative: cum,
        });
    }
    Ok(ProductBoundReport {
        rows,
        b_norm,
        consistent,
        max_ratio_excess: max_excess,
    })
}

/// Replaces each interval longer than `t0` by its first cell, among `ceil(len / t0)` equal cells,
/// whose mass is at least `rho` times its length. Shorter intervals pass through.
pub fn refine_intervals(
    seq: &IntervalSequence,
    sig: &Signal,
    t0: f64,
    rho: f64,
) -> Result<IntervalSequence> {
    if !(t0 > 0.0) {
        return Err(Error::arg("T0", "must be positive"));
    }
    const REL: f64 = 1e-12;
    let mut out = Vec::with_capacity(seq.len());
    for (n, &(a, b)) in seq.intervals.iter().enumerate() {
        let len = b - a;
        let mass = sig.integral(a, b)?;
        if mass < rho * len * (1.0 - REL) {
            return Err(Error::InvalidIntervals(format!(
                "interval {n} = ({a}, {b}) has mass {mass} < rho * length = {}",
                rho * len
            )));
        }
        if len <= t0 {
            out.push((a, b));
            continue;
        }
        let r = (len / t0).ceil() as usize;
        let cell = len / r as f64;
        let mut chosen = None;
        for k in 0..r {
            let lo = a + k as f64 * cell;
            let hi = if k + 1 == r { b } else { lo + cell };
            if sig.integral(lo, hi)? >= rho * (hi - lo) * (1.0 - REL) {
                chosen = Some((lo, hi));
                break;
            }
        }
        // Averaging guarantees a qualifying cell; rounding is the only way to miss one.
        out.push(chosen.ok_or_else(|| {
            Error::InvalidIntervals(format!("no cell of interval {n} reaches mass rho * length"))
        })?);
    }
    IntervalSequence::new(out, seq.rho)
}

/// A nondecreasing cost function `T -> c(T)` tabulated on a grid and linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedCost {
    pub points: Vec<(f64, f64)>,
}

impl TabulatedCost {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::arg("c_of_T", "need at least two points"));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::arg("c_of_T", "grid must be strictly increasing"));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::arg("c_of_T", "costs must be nondecreasing in T"));
            }
        }
        if points.iter().any(|p| !(p.1 > 0.0 && p.1.is_finite())) {
            return Err(Error::arg("c_of_T", "costs must be positive"));
        }
        Ok(TabulatedCost { points })
    }

    /// Tabulates `f` on `n` geometrically spaced points of `[lo, hi]`.
    pub fn from_fn(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && n >= 2) {
            return Err(Error::arg("c_of_T", "need 0 < lo < hi and n >= 2"));
        }
        let r = (hi / lo).ln() / (n - 1) as f64;
        let pts = (0..n)
            .map(|k| {
                let t = if k + 1 == n {
                    hi
                } else {
                    lo * (r * k as f64).exp()
                };
                (t, f(t))
            })
            .collect();
        Self::new(pts)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = (self.points[0].0, self.points[self.points.len() - 1].0);
        let tol = 1e-12 * hi;
        if t < lo - tol || t > hi + tol {
            return Err(Error::arg(
                "c_of_T",
                format!("T = {t} outside the tabulated range [{lo}, {hi}]"),
            ));
        }
        let t = t.clamp(lo, hi);
        let i = self
            .points
            .partition_point(|p| p.0 <= t)
            .clamp(1, self.points.len() - 1);
        let ((x0, y0), (x1, y1)) = (self.points[i - 1], self.points[i]);
        Ok(y0 + (y1 - y0) * (t - x0) / (x1 - x0))
    }

    /// Smallest tabulated value on `[lo, hi]` (the value at `lo` for a monotone table).
    pub fn min_on(&self, lo: f64, hi: f64) -> Result<f64> {
        let mut m = self.eval(lo)?.min(self.eval(hi)?);
        for &(t, c) in &self.points {
            if t >= lo && t <= hi {
                m = m.min(c);
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DivergenceVerdict {
    DivergenceConsistent,
    NotDivergenceConsistent,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub partial_sums: Vec<f64>,
    /// `c` at the refined lengths (intervals longer than `T0` are cut into `[T0/2, T0]` cells).
    pub refined_partial_sum: f64,
    /// `count * min_{[T0/2, T0]} c` over refined lengths that fall in `[T0/2, T0]`.
    pub refined_lower_bound: f64,
    /// Fitted decay exponent `p` of the terms `c_n ~ n^{-p}` over the second half of the sequence.
    pub term_exponent: f64,
    pub verdict: DivergenceVerdict,
    pub horizon: f64,
    /// `V(b_n)` along a simulation, when one was requested.
    pub energy_at_interval_ends: Option<Vec<f64>>,
}

/// Terms decaying no faster than `n^{-P_MAX}` count as divergence-consistent.
pub const P_MAX: f64 = 1.05;

/// Finite-horizon evidence for `sum c(b_n - a_n) = inf`.
pub fn rho_class_criterion(
    seq: &IntervalSequence,
    c_of_t: &TabulatedCost,
    t0: f64,
    sim: Option<(&LinearSystem, &Signal, &DVector<f64>)>,
) -> Result<CriterionReport> {
    if seq.len() < 4 {
        return Err(Error::arg("intervals", "need at least four intervals"));
    }
    let terms: Vec<f64> = seq
        .lengths()
        .map(|l| c_of_t.eval(l))
        .collect::<Result<_>>()?;
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect();

    let refined: Vec<f64> = seq
        .lengths()
        .map(|l| if l <= t0 { l } else { l / (l / t0).ceil() })
        .collect();
    let mut refined_partial_sum = 0.0;
    let mut in_range = 0usize;
    for &l in &refined {
        refined_partial_sum += c_of_t.eval(l)?;
        if l >= 0.5 * t0 * (1.0 - 1e-12) && l <= t0 * (1.0 + 1e-12) {
            in_range += 1;
        }
    }
    let refined_lower_bound = if in_range > 0 {
        in_range as f64 * c_of_t.min_on(0.5 * t0, t0)?
    } else {
        0.0
    };

    let half = terms.len() / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = terms[half..]
        .iter()
        .enumerate()
        .map(|(k, &c)| (((half + k + 1) as f64).ln(), c.ln()))
        .unzip();
    let (slope, _, _) = observability::linear_fit(&xs, &ys);
    let term_exponent = -slope;
    let verdict = if term_exponent <= P_MAX {
        DivergenceVerdict::DivergenceConsistent
    } else {
        DivergenceVerdict::NotDivergenceConsistent
    };

    let energy_at_interval_ends = match sim {
        Some((sys, sig, z0)) => {
            let mut z = z0.clone();
            let mut t = 0.0;
            let mut out = Vec::with_capacity(seq.len());
            for &(_, b) in &seq.intervals {
                z = sys.propagate(sig, &z, t, b)?;
                t = b;
                out.push(0.5 * z.norm_squared());
            }
            Some(out)
        }
        None => None,
    };
    Ok(CriterionReport {
        partial_sums,
        refined_partial_sum,
        refined_lower_bound,
        term_exponent,
        verdict,
        horizon: seq.intervals.last().map(|iv| iv.1).unwrap_or(0.0),
        energy_at_interval_ends,
    })
}
