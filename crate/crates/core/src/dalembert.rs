//! A periodic solution of the string `v_tt = v_xx - alpha(t) chi_omega(x) v_t` on which a
//! persistently exciting gate signal never acts.
//!
//! With `omega = (a, b)`, `b < 1`, `b' = (1 + b)/2`, `mu = 1 - b'` and the gate
//! `alpha = sum_k chi_[2k - mu, 2k + mu)`, the d'Alembert solution
//! `v(t, x) = Psi(x + t) - Psi(t - x)` with `Psi` the 2-periodic extension of a profile
//! supported in `[b', 1]` keeps `v_t(t, .)` supported in `[b, 1]` whenever `alpha(t) = 1`.
//!
//! The profile is the C^1 bump `psi(x) = 16 s^2 (1 - s)^2`, `s = (x - b')/(1 - b')`, in place
//! of the indicator of `[b', 1]`; only the support matters for the argument, and the bump
//! gives finite `H^1_0 x L^2` energy.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modal::{self, ModalSystem, WaveDamping, WaveModalSpec};
use crate::quad::GaussLegendre;
use crate::signals::{PeReport, Signal};

/// Recorded in every counterexample report.
pub const PROFILE_NOTE: &str = "profile is the C1 bump 16 s^2 (1-s)^2 supported in [b', 1] \
instead of the indicator of [b', 1]; support containment is unchanged and the energy is finite";

const PERIOD: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleScenario {
    pub omega: (f64, f64),
    pub b_prime: f64,
    pub mu: f64,
    #[serde(rename = "T")]
    pub period: f64,
    /// Half-width of the gate pulses (`mu` for the genuine construction).
    pub pulse_halfwidth: f64,
    pub amplitude: f64,
}

pub fn build_counterexample(omega: (f64, f64)) -> Result<CounterexampleScenario> {
    let (a, b) = omega;
    if !(0.0 <= a && a < b) {
        return Err(Error::arg(
            "omega",
            format!("need 0 <= a < b, got ({a}, {b})"),
        ));
    }
    if b >= 1.0 {
        return Err(Error::arg("omega", format!("need b < 1, got b = {b}")));
    }
    let mut b_prime = 0.5 * (1.0 + b);
    // Keep b' - mu = 2b' - 1 >= b exactly in floating point.
    while b_prime - (1.0 - b_prime) < b {
        b_prime = b_prime.next_up();
    }
    let mu = 1.0 - b_prime;
    Ok(CounterexampleScenario {
        omega,
        b_prime,
        mu,
        period: PERIOD,
        pulse_halfwidth: mu,
        amplitude: 1.0,
    })
}

impl CounterexampleScenario {
    /// Same construction with a different gate half-width (negative controls).
    pub fn with_pulse_halfwidth(mut self, h: f64) -> Self {
        self.pulse_halfwidth = h;
        self
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// The gate signal over `n_periods` periods.
    pub fn signal(&self, n_periods: usize) -> Result<Signal> {
        Signal::periodic_gate(
            self.period,
            self.pulse_halfwidth,
            self.period * n_periods as f64,
        )
    }

    fn width(&self) -> f64 {
        1.0 - self.b_prime
    }

    /// Bump profile `psi` on the real line (zero outside `[b', 1]`).
    pub fn profile(&self, x: f64) -> f64 {
        if x < self.b_prime || x > 1.0 {
            return 0.0;
        }
        let s = (x - self.b_prime) / self.width();
        self.amplitude * 16.0 * s * s * (1.0 - s) * (1.0 - s)
    }

    pub fn profile_derivative(&self, x: f64) -> f64 {
        if x < self.b_prime || x > 1.0 {
            return 0.0;
        }
        let s = (x - self.b_prime) / self.width();
        self.amplitude * 32.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / self.width()
    }

    fn periodic(&self, y: f64) -> f64 {
        self.profile(y.rem_euclid(self.period))
    }

    fn periodic_derivative(&self, y: f64) -> f64 {
        self.profile_derivative(y.rem_euclid(self.period))
    }

    /// `v(t, x) = Psi(x + t) - Psi(t - x)`.
    pub fn displacement(&self, t: f64, x: f64) -> f64 {
        self.periodic(x + t) - self.periodic(t - x)
    }

    pub fn velocity(&self, t: f64, x: f64) -> f64 {
        self.periodic_derivative(x + t) - self.periodic_derivative(t - x)
    }

    pub fn slope(&self, t: f64, x: f64) -> f64 {
        self.periodic_derivative(x + t) + self.periodic_derivative(t - x)
    }

    /// Points of `(0, 1)` where the integrand pieces change at time `t`.
    fn x_breaks(&self, t: f64) -> Vec<f64> {
        let mut xs = vec![0.0, 1.0];
        for c in [self.b_prime, 1.0] {
            for j in -2..=2 {
                let shift = c + PERIOD * j as f64;
                for x in [shift - t.rem_euclid(PERIOD), t.rem_euclid(PERIOD) - shift] {
                    if x > 0.0 && x < 1.0 {
                        xs.push(x);
                    }
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }

    fn integrate_pieces<F: Fn(f64) -> f64>(&self, t: f64, lo: f64, hi: f64, f: F) -> f64 {
        let gl = GaussLegendre::new(6);
        let mut xs: Vec<f64> = self
            .x_breaks(t)
            .into_iter()
            .filter(|&x| x > lo && x < hi)
            .collect();
        xs.insert(0, lo);
        xs.push(hi);
        xs.windows(2).map(|w| gl.integrate(&f, w[0], w[1])).sum()
    }

    /// `(1/2) int_0^1 (v_x^2 + v_t^2) dx`, exact up to rounding (the integrand is a
    /// polynomial of degree 6 between consecutive support edges).
    pub fn energy(&self, t: f64) -> f64 {
        0.5 * self.integrate_pieces(t, 0.0, 1.0, |x| {
            self.slope(t, x).powi(2) + self.velocity(t, x).powi(2)
        })
    }

    /// `int_omega v_t(t, x)^2 dx` by quadrature.
    pub fn damped_velocity_mass(&self, t: f64) -> f64 {
        let (a, b) = self.omega;
        self.integrate_pieces(t, a, b, |x| self.velocity(t, x).powi(2))
    }

    /// Closed hull of `supp v_t(t, .)` over local times `tau in [tau_lo, tau_hi]` relative to
    /// a pulse centre, as intervals of `[0, 1]`.
    fn swept_support(&self, tau_lo: f64, tau_hi: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for j in -1..=1 {
            let shift = PERIOD * j as f64;
            // x + tau in [b', 1] + 2j
            let right_moving = (self.b_prime + shift - tau_hi, 1.0 + shift - tau_lo);
            // tau - x in [b', 1] + 2j
            let left_moving = (tau_lo - 1.0 - shift, tau_hi - self.b_prime - shift);
            for (lo, hi) in [right_moving, left_moving] {
                let (lo, hi) = (lo.max(0.0), hi.min(1.0));
                if lo <= hi {
                    out.push((lo, hi));
                }
            }
        }
        out
    }

    /// Analytic certificate: total length of `supp v_t(t, .) ∩ omega` swept over each active
    /// pulse of the gate, maximised over the pulses in `n_periods` periods.
    pub fn support_overlap(&self, n_periods: usize) -> (f64, usize) {
        let (a, b) = self.omega;
        let h = self.pulse_halfwidth;
        let mut worst: f64 = 0.0;
        let mut pulses = 0;
        for k in 0..=n_periods {
            // The k = 0 pulse is clipped at t = 0; later pulses are translates by 2k, under
            // which Psi is invariant, so local coordinates are exact.
            let tau_lo = if k == 0 { 0.0 } else { -h };
            let overlap: f64 = self
                .swept_support(tau_lo, h)
                .iter()
                .map(|&(lo, hi)| (hi.min(b) - lo.max(a)).max(0.0))
                .sum();
            worst = worst.max(overlap);
            pulses += 1;
        }
        (worst, pulses)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InertReport {
    pub pe: PeReport,
    pub pe_ok: bool,
    /// Analytic overlap length of `supp v_t` with `omega` over active times.
    pub max_overlap: f64,
    /// Largest `int_omega v_t^2` over a grid of active times (corroborating only).
    pub max_quadrature_overlap: f64,
    pub active_pulses: usize,
    pub inert: bool,
}

/// Certifies that the damping never acts on the solution during `n_periods` periods.
pub fn verify_damping_inert(sc: &CounterexampleScenario, n_periods: usize) -> Result<InertReport> {
    if n_periods == 0 {
        return Err(Error::arg("periods", "at least one period is required"));
    }
    let horizon = sc.period * n_periods as f64;
    let sig = sc.signal(n_periods)?;
    let pe = sig.pe_check(sc.period, sc.mu, horizon)?;
    let (max_overlap, active_pulses) = sc.support_overlap(n_periods);

    let mut max_quad: f64 = 0.0;
    let samples = 64;
    for (lo, hi, level) in sig.pieces(0.0, horizon) {
        if level == 0.0 {
            continue;
        }
        for i in 0..samples {
            let t = lo + (hi - lo) * i as f64 / samples as f64;
            max_quad = max_quad.max(sc.damped_velocity_mass(t));
        }
    }
    let pe_ok = pe.holds;
    Ok(InertReport {
        pe,
        pe_ok,
        max_overlap,
        max_quadrature_overlap: max_quad,
        active_pulses,
        inert: pe_ok && max_overlap == 0.0,
    })
}

pub fn energy_of_counterexample(sc: &CounterexampleScenario, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::arg("t", format!("t = {t} must be finite and >= 0")));
    }
    Ok(sc.energy(t))
}

/// Largest `|E(t) - E(0)|` over `samples` equispaced times in `[0, 2 n_periods]`.
pub fn energy_drift(sc: &CounterexampleScenario, n_periods: usize, samples: usize) -> f64 {
    let e0 = sc.energy(0.0);
    let horizon = sc.period * n_periods as f64;
    (0..=samples)
        .map(|k| (sc.energy(horizon * k as f64 / samples as f64) - e0).abs())
        .fold(0.0, f64::max)
}

/// Full counterexample report, as emitted by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub omega: (f64, f64),
    pub b_prime: f64,
    pub mu: f64,
    #[serde(rename = "T")]
    pub period: f64,
    pub periods: usize,
    pub pe_ok: bool,
    pub max_overlap: f64,
    pub max_quadrature_overlap: f64,
    pub energy: f64,
    pub energy_drift: f64,
    pub inert: bool,
    pub profile_note: &'static str,
}

pub fn counterexample_report(omega: (f64, f64), n_periods: usize) -> Result<CounterexampleReport> {
    let sc = build_counterexample(omega)?;
    let inert = verify_damping_inert(&sc, n_periods)?;
    Ok(CounterexampleReport {
        omega,
        b_prime: sc.b_prime,
        mu: sc.mu,
        period: sc.period,
        periods: n_periods,
        pe_ok: inert.pe_ok,
        max_overlap: inert.max_overlap,
        max_quadrature_overlap: inert.max_quadrature_overlap,
        energy: sc.energy(0.0),
        energy_drift: energy_drift(&sc, n_periods, 50 * n_periods),
        inert: inert.inert,
        profile_note: PROFILE_NOTE,
    })
}

/// Projection of the counterexample's initial data `(psi, psi')` onto `n_modes` string modes
/// with localized damping on `omega`.
pub fn modal_projection(
    sc: &CounterexampleScenario,
    n_modes: usize,
) -> Result<(ModalSystem, DVector<f64>)> {
    let (a, b) = sc.omega;
    let spec = WaveModalSpec::unit_interval(n_modes, WaveDamping::Localized(a, b));
    let sys = modal::build_wave(&spec)?;
    let gl = GaussLegendre::new(10);
    let panels = 4 * n_modes.max(1);
    let mut disp = Vec::with_capacity(n_modes);
    let mut vel = Vec::with_capacity(n_modes);
    for n in 1..=n_modes {
        let k = n as f64 * std::f64::consts::PI;
        let phi = |x: f64| std::f64::consts::SQRT_2 * (k * x).sin();
        disp.push(gl.integrate_composite(|x| sc.profile(x) * phi(x), sc.b_prime, 1.0, panels));
        vel.push(gl.integrate_composite(
            |x| sc.profile_derivative(x) * phi(x),
            sc.b_prime,
            1.0,
            panels,
        ));
    }
    let z0 = modal::wave_state(&spec.eigenvalues, &disp, &vel);
    Ok((sys, z0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scenario() -> CounterexampleScenario {
        build_counterexample((0.2, 0.6)).unwrap()
    }

    #[test]
    fn parameters() {
        let sc = scenario();
        assert!((sc.b_prime - 0.8).abs() < 1e-15);
        assert!((sc.mu - 0.2).abs() < 1e-15);
        assert_eq!(sc.period, 2.0);
        assert!(build_counterexample((0.2, 1.0)).is_err());
        assert!(build_counterexample((0.5, 0.4)).is_err());
        // 2b' - 1 >= b holds exactly for awkward inputs too.
        for &b in &[0.6, 0.1, 0.7, 0.99, 0.3333333333333333] {
            let sc = build_counterexample((0.0, b)).unwrap();
            assert!(sc.b_prime - sc.mu >= b);
        }
    }

    #[test]
    fn boundary_and_periodicity() {
        let sc = scenario();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let t: f64 = rng.random_range(0.0..20.0);
            assert_eq!(sc.displacement(t, 0.0), 0.0);
            assert!(sc.displacement(t, 1.0).abs() < 1e-12);
            let x: f64 = rng.random_range(0.0..1.0);
            assert!((sc.displacement(t + 2.0, x) - sc.displacement(t, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn profile_is_c1_with_compact_support() {
        let sc = scenario();
        assert_eq!(sc.profile(0.8), 0.0);
        assert_eq!(sc.profile(1.0), 0.0);
        assert_eq!(sc.profile_derivative(0.8), 0.0);
        assert_eq!(sc.profile_derivative(1.0), 0.0);
        assert!((sc.profile(0.9) - 1.0).abs() < 1e-12);
        // Derivative against centred differences.
        for &x in &[0.81, 0.85, 0.93, 0.99] {
            let h = 1e-6;
            let fd = (sc.profile(x + h) - sc.profile(x - h)) / (2.0 * h);
            assert!((fd - sc.profile_derivative(x)).abs() < 1e-6);
        }
    }

    #[test]
    fn inert_over_three_periods() {
        let r = verify_damping_inert(&scenario(), 3).unwrap();
        assert!(r.pe_ok);
        assert_eq!(r.max_overlap, 0.0);
        assert_eq!(r.max_quadrature_overlap, 0.0);
        assert!(r.inert);

        let wide = build_counterexample((0.0, 0.99)).unwrap();
        assert!((wide.mu - 0.005).abs() < 1e-12);
        assert!(verify_damping_inert(&wide, 3).unwrap().inert);
    }

    #[test]
    fn widened_pulses_break_inertness() {
        let sc = scenario();
        let wide = sc.clone().with_pulse_halfwidth(2.0 * sc.mu);
        let r = verify_damping_inert(&wide, 3).unwrap();
        assert!(!r.inert);
        assert!(r.max_overlap > 0.1);
        assert!(r.max_quadrature_overlap > 0.0);
    }

    #[test]
    fn energy_is_constant() {
        let sc = scenario();
        let e0 = energy_of_counterexample(&sc, 0.0).unwrap();
        assert!(e0 > 0.0);
        // int_{b'}^1 psi'^2 = (32^2 / w) int_0^1 s^2 (1-s)^2 (1-2s)^2 ds = 1024 / (210 w)
        let w = 1.0 - sc.b_prime;
        assert!((e0 - 1024.0 / (210.0 * w)).abs() < 1e-9 * e0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let t: f64 = rng.random_range(0.0..6.0);
            assert!((sc.energy(t) - e0).abs() <= 1e-8);
        }
        let flat = sc.with_amplitude(0.0);
        assert_eq!(flat.energy(1.3), 0.0);
    }
}
