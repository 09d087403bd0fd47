//! Spectral truncations of the damped string and the damped Schrödinger equation on the
//! unit interval, in the Dirichlet sine basis `phi_n(x) = sqrt(2) sin(n pi x)`.
//!
//! Wave state layout: `(sqrt(lambda_n) a_n, a_n')` per mode, so `||z||^2 / 2` is the
//! `H^1_0 x L^2` energy of the truncated solution.
//!
//! Schrödinger state layout: `(Re c_n, Im c_n)` per mode, interleaved, so `||z||` is the
//! `L^2` norm of the truncated wavefunction.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::linsys::LinearSystem;

/// Flag carried by every report on a truncated Schrödinger system.
pub const TRUNCATION_CAVEAT: &str = "finite modal truncation: the truncated system is exactly \
observable, so weak-but-not-strong stability of the infinite-dimensional system cannot \
manifest numerically";

fn check_omega(omega: (f64, f64)) -> Result<()> {
    let (a, b) = omega;
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::arg(
            "omega",
            format!("need 0 <= a < b <= 1, got ({a}, {b})"),
        ));
    }
    Ok(())
}

/// Antiderivative of `cos(k pi x)`, with `k = 0` giving `x`.
fn cos_primitive(k: i64, x: f64) -> f64 {
    if k == 0 {
        x
    } else {
        let w = k as f64 * PI;
        (w * x).sin() / w
    }
}

/// `G_nm = int_a^b 2 sin(n pi x) sin(m pi x) dx` for `n, m = 1..=n_modes`, in closed form.
pub fn gram_matrix(omega: (f64, f64), n_modes: usize) -> Result<DMatrix<f64>> {
    check_omega(omega)?;
    let (a, b) = omega;
    let mut g = DMatrix::zeros(n_modes, n_modes);
    for i in 0..n_modes {
        for j in 0..=i {
            let (n, m) = (i as i64 + 1, j as i64 + 1);
            let diff = cos_primitive(n - m, b) - cos_primitive(n - m, a);
            let sum = cos_primitive(n + m, b) - cos_primitive(n + m, a);
            let v = diff - sum;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// Damping profile of a modal wave system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveDamping {
    /// `d(x) = d0` everywhere.
    Uniform(f64),
    /// `d = chi_omega`.
    Localized(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveModalSpec {
    pub eigenvalues: Vec<f64>,
    pub damping: WaveDamping,
}

impl WaveModalSpec {
    /// Unit string: `lambda_n = (n pi)^2`.
    pub fn unit_interval(n_modes: usize, damping: WaveDamping) -> Self {
        WaveModalSpec {
            eigenvalues: (1..=n_modes).map(|n| (n as f64 * PI).powi(2)).collect(),
            damping,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.eigenvalues.is_empty() {
            return Err(Error::arg("n_modes", "at least one mode is required"));
        }
        let mut prev = 0.0;
        for &l in &self.eigenvalues {
            if !(l > prev && l.is_finite()) {
                return Err(Error::arg("eigenvalues", "must be positive and increasing"));
            }
            prev = l;
        }
        match self.damping {
            WaveDamping::Uniform(d0) if !(d0 > 0.0 && d0.is_finite()) => {
                Err(Error::arg("uniform", format!("d0 = {d0} must be positive")))
            }
            WaveDamping::Localized(a, b) => check_omega((a, b)),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchrodingerModalSpec {
    pub n_modes: usize,
    pub omega: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModalKind {
    WaveModal,
    SchrodingerModal,
}

/// A modal truncation together with the metadata reports need.
#[derive(Debug, Clone)]
pub struct ModalSystem {
    pub system: LinearSystem,
    pub kind: ModalKind,
    pub n_modes: usize,
    pub eigenvalues: Vec<f64>,
    /// `Some` for every Schrödinger truncation.
    pub truncation_caveat: Option<&'static str>,
}

/// Velocity-block damping operator of a wave truncation.
fn wave_velocity_operator(spec: &WaveModalSpec) -> Result<DMatrix<f64>> {
    let n = spec.eigenvalues.len();
    match spec.damping {
        WaveDamping::Uniform(d0) => Ok(DMatrix::identity(n, n) * (d0 * d0)),
        WaveDamping::Localized(a, b) => gram_matrix((a, b), n),
    }
}

pub fn build_wave(spec: &WaveModalSpec) -> Result<ModalSystem> {
    spec.validate()?;
    let n = spec.eigenvalues.len();
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    for (k, &l) in spec.eigenvalues.iter().enumerate() {
        let w = l.sqrt();
        a[(2 * k, 2 * k + 1)] = w;
        a[(2 * k + 1, 2 * k)] = -w;
    }
    let root = linalg::psd_sqrt(&wave_velocity_operator(spec)?)?;
    let mut b = DMatrix::zeros(2 * n, n);
    for k in 0..n {
        for j in 0..n {
            b[(2 * k + 1, j)] = root[(k, j)];
        }
    }
    Ok(ModalSystem {
        system: LinearSystem::new(a, b)?,
        kind: ModalKind::WaveModal,
        n_modes: n,
        eigenvalues: spec.eigenvalues.clone(),
        truncation_caveat: None,
    })
}

pub fn build_schrodinger(spec: &SchrodingerModalSpec) -> Result<ModalSystem> {
    if spec.n_modes == 0 {
        return Err(Error::arg("n_modes", "at least one mode is required"));
    }
    let n = spec.n_modes;
    let g = gram_matrix(spec.omega, n)?;
    let eigenvalues: Vec<f64> = (1..=n).map(|k| (k as f64 * PI).powi(2)).collect();
    // c_n' = -i lambda_n c_n - alpha (G c)_n; with c = p + i q: p' = lambda q, q' = -lambda p.
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    for (k, &l) in eigenvalues.iter().enumerate() {
        a[(2 * k, 2 * k + 1)] = l;
        a[(2 * k + 1, 2 * k)] = -l;
    }
    let root = linalg::psd_sqrt(&g)?;
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        for j in 0..n {
            b[(2 * k, 2 * j)] = root[(k, j)];
            b[(2 * k + 1, 2 * j + 1)] = root[(k, j)];
        }
    }
    Ok(ModalSystem {
        system: LinearSystem::new(a, b)?,
        kind: ModalKind::SchrodingerModal,
        n_modes: n,
        eigenvalues,
        truncation_caveat: Some(TRUNCATION_CAVEAT),
    })
}

/// Wave state `(sqrt(lambda_n) a_n, b_n)` from displacement and velocity coefficients.
pub fn wave_state(eigenvalues: &[f64], displacement: &[f64], velocity: &[f64]) -> DVector<f64> {
    let n = eigenvalues.len();
    DVector::from_fn(2 * n, |i, _| {
        let k = i / 2;
        if i % 2 == 0 {
            eigenvalues[k].sqrt() * displacement[k]
        } else {
            velocity[k]
        }
    })
}

/// `(1/2) sum (lambda_n a_n^2 + a_n'^2)`.
pub fn wave_energy(eigenvalues: &[f64], displacement: &[f64], velocity: &[f64]) -> f64 {
    0.5 * eigenvalues
        .iter()
        .zip(displacement.iter().zip(velocity))
        .map(|(l, (a, v))| l * a * a + v * v)
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::Signal;

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (depth < 34 && (left + right - whole).abs() <= 15.0 * tol) {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 40)
    }

    #[test]
    fn gram_examples() {
        let full = gram_matrix((0.0, 1.0), 6).unwrap();
        assert!((full - DMatrix::<f64>::identity(6, 6)).amax() < 1e-14);
        let half = gram_matrix((0.0, 0.5), 3).unwrap();
        assert!((half[(0, 0)] - 0.5).abs() < 1e-15);
        let g = gram_matrix((0.2, 0.6), 5).unwrap();
        assert_eq!(g[(0, 1)], g[(1, 0)]);
        assert!(gram_matrix((0.6, 0.2), 2).is_err());
    }

    #[test]
    fn gram_matches_quadrature() {
        for &(a, b) in &[(0.2, 0.6), (0.05, 0.93), (0.41, 0.47)] {
            let g = gram_matrix((a, b), 12).unwrap();
            for n in 1..=12 {
                for m in 1..=12 {
                    let f = |x: f64| 2.0 * (n as f64 * PI * x).sin() * (m as f64 * PI * x).sin();
                    let q = adaptive_simpson(&f, a, b, 1e-14);
                    assert!((g[(n - 1, m - 1)] - q).abs() < 1e-10, "({n},{m}) {a},{b}");
                }
            }
        }
    }

    #[test]
    fn one_mode_uniform_wave_is_damped_oscillator() {
        let spec = WaveModalSpec {
            eigenvalues: vec![1.0],
            damping: WaveDamping::Uniform(1.0),
        };
        let m = build_wave(&spec).unwrap();
        let cl = m.system.closed_loop(1.0);
        let expect = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -1.0]);
        assert!((cl - expect).amax() < 1e-15);
    }

    #[test]
    fn localized_wave_structure() {
        let m = build_wave(&WaveModalSpec::unit_interval(
            8,
            WaveDamping::Localized(0.2, 0.6),
        ))
        .unwrap();
        let a = m.system.a();
        assert!((a + a.transpose()).amax() <= 1e-12);
        let bbt = m.system.bbt();
        let min = linalg::min_eigenpair(bbt).0;
        assert!(min > -1e-12);
        let g = gram_matrix((0.2, 0.6), 8).unwrap();
        for k in 0..8 {
            for j in 0..8 {
                assert!((bbt[(2 * k + 1, 2 * j + 1)] - g[(k, j)]).abs() < 1e-12);
                assert_eq!(bbt[(2 * k, 2 * j)], 0.0);
            }
        }
    }

    #[test]
    fn undamped_wave_conserves_energy() {
        let m = build_wave(&WaveModalSpec::unit_interval(
            4,
            WaveDamping::Localized(0.1, 0.3),
        ))
        .unwrap();
        let z0 = DVector::from_vec(vec![1.0, 0.5, -0.2, 0.3, 0.1, 0.0, 0.05, -0.4]);
        let traj = m
            .system
            .simulate(&Signal::constant(0.0).unwrap(), &z0, 20.0, 0.1)
            .unwrap();
        for v in &traj.energies {
            assert!((v - traj.energies[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn schrodinger_structure() {
        let m = build_schrodinger(&SchrodingerModalSpec {
            n_modes: 4,
            omega: (0.3, 0.7),
        })
        .unwrap();
        let a = m.system.a();
        assert_eq!((a + a.transpose()).amax(), 0.0);
        assert!(m.truncation_caveat.is_some());

        let full = build_schrodinger(&SchrodingerModalSpec {
            n_modes: 3,
            omega: (0.0, 1.0),
        })
        .unwrap();
        assert!((full.system.bbt() - DMatrix::<f64>::identity(6, 6)).amax() < 1e-12);
    }

    #[test]
    fn schrodinger_full_damping_decays_like_mass() {
        let m = build_schrodinger(&SchrodingerModalSpec {
            n_modes: 3,
            omega: (0.0, 1.0),
        })
        .unwrap();
        let sig = Signal::periodic_gate(1.0, 0.2, 5.0).unwrap();
        let z0 = DVector::from_vec(vec![0.3, 0.1, -0.5, 0.2, 0.7, -0.1]);
        let traj = m.system.simulate(&sig, &z0, 3.0, 0.05).unwrap();
        for (t, v) in traj.times.iter().zip(&traj.energies) {
            let expect = 0.5 * z0.norm_squared() * (-2.0 * sig.integral(0.0, *t).unwrap()).exp();
            assert!((v - expect).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn uniform_modes_decouple() {
        let spec = WaveModalSpec::unit_interval(3, WaveDamping::Uniform(0.8));
        let full = build_wave(&spec).unwrap();
        let sig = Signal::periodic_gate(1.5, 0.3, 6.0).unwrap();
        let z0 = DVector::from_vec(vec![0.4, -0.2, 0.9, 0.1, -0.3, 0.6]);
        let traj = full.system.simulate(&sig, &z0, 6.0, 0.25).unwrap();
        for k in 0..3 {
            let single = build_wave(&WaveModalSpec {
                eigenvalues: vec![spec.eigenvalues[k]],
                damping: WaveDamping::Uniform(0.8),
            })
            .unwrap();
            let zk = DVector::from_vec(vec![z0[2 * k], z0[2 * k + 1]]);
            let tk = single.system.simulate(&sig, &zk, 6.0, 0.25).unwrap();
            for (zf, zs) in traj.states.iter().zip(&tk.states) {
                assert!((zf[2 * k] - zs[0]).abs() < 1e-9);
                assert!((zf[2 * k + 1] - zs[1]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn energy_identity() {
        let eig: Vec<f64> = (1..=3).map(|n| (n as f64 * PI).powi(2)).collect();
        let a = [0.3, -0.1, 0.02];
        let v = [1.0, 0.4, -0.7];
        let z = wave_state(&eig, &a, &v);
        assert!((0.5 * z.norm_squared() - wave_energy(&eig, &a, &v)).abs() < 1e-14);
    }
}
