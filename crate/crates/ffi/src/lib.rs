//! C ABI for pexstab.
//!
//! Objects are opaque handles created by `pex_*_new`-style constructors and released with the
//! matching `pex_*_free`. Every fallible call returns a [`PexStatus`]; on failure the message is
//! available from [`pex_last_error_message`] on the same thread. Matrices are row-major.

// `!(x > 0.0)` style checks are kept because they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use nalgebra::{DMatrix, DVector};
use pexstab::modal::{self, SchrodingerModalSpec, WaveDamping, WaveModalSpec};
use pexstab::{dalembert, observability, stability, Error, LinearSystem, Signal, Trajectory};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PexStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSignal = 3,
    DimensionMismatch = 4,
    NotDissipative = 5,
    Uncontrollable = 6,
    Infeasible = 7,
    Numerical = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Piecewise-constant damping signal.
pub struct PexSignal(Signal);

/// Dissipative pair `(A, B)`.
pub struct PexSystem(LinearSystem);

/// Sampled simulation result.
pub struct PexTrajectory(Trajectory);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PexPeReport {
    pub holds: bool,
    pub worst_window_start: f64,
    pub worst_window_mass: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PexCounterexample {
    pub b_prime: f64,
    pub mu: f64,
    pub period: f64,
    pub pe_ok: bool,
    pub max_overlap: f64,
    pub energy: f64,
    pub energy_drift: f64,
    pub inert: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PexCertificate {
    pub q: f64,
    pub theta: f64,
    pub m: f64,
    pub gamma: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> PexStatus {
    match err {
        Error::InvalidSignal(_) | Error::InvalidIntervals(_) => PexStatus::InvalidSignal,
        Error::DimensionMismatch(_) | Error::DimensionLimit { .. } => PexStatus::DimensionMismatch,
        Error::NotDissipative { .. } => PexStatus::NotDissipative,
        Error::Uncontrollable { .. } => PexStatus::Uncontrollable,
        Error::Infeasible(_) | Error::Unbounded => PexStatus::Infeasible,
        Error::NonFinite { .. } | Error::NotPositiveSemidefinite { .. } => PexStatus::Numerical,
        _ => PexStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (PexStatus, String)>) -> PexStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PexStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PexStatus::Panic
        }
    }
}

fn lib(err: Error) -> (PexStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (PexStatus, String) {
    (PexStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn read<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], (PexStatus, String)> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, n))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (PexStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), (PexStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> Result<(), (PexStatus, String)> {
    if len < src.len() {
        return Err((
            PexStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pex_version() -> *const c_char {
    static V: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(s) => s,
            Err(_) => panic!("version string"),
        };
    V.as_ptr()
}

/// Copies the last error message of this thread into `buf` (truncated, NUL-terminated) and
/// returns the full message length excluding the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn pex_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Signal with `values[i]` on `[breakpoints[i-1], breakpoints[i])` (first cell from 0) and
/// `tail` afterwards.
///
/// # Safety
/// `breakpoints` and `values` must be valid for `n` reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_signal_piecewise(
    breakpoints: *const f64,
    values: *const f64,
    n: usize,
    tail: f64,
    out: *mut *mut PexSignal,
) -> PexStatus {
    guard(|| {
        let bps = read(breakpoints, n, "breakpoints")?.to_vec();
        let vals = read(values, n, "values")?.to_vec();
        let sig = Signal::piecewise(bps, vals, tail).map_err(lib)?;
        put(out, Box::into_raw(Box::new(PexSignal(sig))), "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_signal_constant(level: f64, out: *mut *mut PexSignal) -> PexStatus {
    guard(|| {
        let sig = Signal::constant(level).map_err(lib)?;
        put(out, Box::into_raw(Box::new(PexSignal(sig))), "out")
    })
}

/// Unit pulses of half-width `halfwidth` centred at multiples of `period`, up to `horizon`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_signal_periodic_gate(
    period: f64,
    halfwidth: f64,
    horizon: f64,
    out: *mut *mut PexSignal,
) -> PexStatus {
    guard(|| {
        let sig = Signal::periodic_gate(period, halfwidth, horizon).map_err(lib)?;
        put(out, Box::into_raw(Box::new(PexSignal(sig))), "out")
    })
}

/// # Safety
/// `sig` must come from a `pex_signal_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pex_signal_free(sig: *mut PexSignal) {
    if !sig.is_null() {
        drop(Box::from_raw(sig));
    }
}

/// # Safety
/// `sig` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_signal_eval(
    sig: *const PexSignal,
    t: f64,
    out: *mut f64,
) -> PexStatus {
    guard(|| {
        let s = handle(sig, "sig")?;
        if !(t >= 0.0) {
            return Err((PexStatus::InvalidArgument, format!("t = {t} must be >= 0")));
        }
        put(out, s.0.eval(t), "out")
    })
}

/// `int_a^b alpha`.
///
/// # Safety
/// `sig` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_signal_integral(
    sig: *const PexSignal,
    a: f64,
    b: f64,
    out: *mut f64,
) -> PexStatus {
    guard(|| {
        let s = handle(sig, "sig")?;
        put(out, s.0.integral(a, b).map_err(lib)?, "out")
    })
}

/// Exact check of `int_t^{t+T} alpha >= mu` for all `t` in `[0, horizon - T]`.
///
/// # Safety
/// `sig` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_signal_pe_check(
    sig: *const PexSignal,
    window: f64,
    mu: f64,
    horizon: f64,
    out: *mut PexPeReport,
) -> PexStatus {
    guard(|| {
        let s = handle(sig, "sig")?;
        let r = s.0.pe_check(window, mu, horizon).map_err(lib)?;
        put(
            out,
            PexPeReport {
                holds: r.holds,
                worst_window_start: r.worst_window_start,
                worst_window_mass: r.worst_window_mass,
            },
            "out",
        )
    })
}

/// System from row-major `a` (`n x n`) and `b` (`n x r`).
///
/// # Safety
/// `a` must be valid for `n*n` reads, `b` for `n*r`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_system_new(
    a: *const f64,
    n: usize,
    b: *const f64,
    r: usize,
    out: *mut *mut PexSystem,
) -> PexStatus {
    guard(|| {
        if n == 0 || r == 0 {
            return Err((
                PexStatus::DimensionMismatch,
                "n and r must be positive".into(),
            ));
        }
        let am = DMatrix::from_row_slice(n, n, read(a, n * n, "a")?);
        let bm = DMatrix::from_row_slice(n, r, read(b, n * r, "b")?);
        let sys = LinearSystem::new(am, bm).map_err(lib)?;
        put(out, Box::into_raw(Box::new(PexSystem(sys))), "out")
    })
}

/// String truncation on the unit interval with uniform damping `d0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_system_wave_uniform(
    n_modes: usize,
    d0: f64,
    out: *mut *mut PexSystem,
) -> PexStatus {
    guard(|| {
        let m = modal::build_wave(&WaveModalSpec::unit_interval(
            n_modes,
            WaveDamping::Uniform(d0),
        ))
        .map_err(lib)?;
        put(out, Box::into_raw(Box::new(PexSystem(m.system))), "out")
    })
}

/// String truncation with damping on `(a, b)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_system_wave_localized(
    n_modes: usize,
    a: f64,
    b: f64,
    out: *mut *mut PexSystem,
) -> PexStatus {
    guard(|| {
        let m = modal::build_wave(&WaveModalSpec::unit_interval(
            n_modes,
            WaveDamping::Localized(a, b),
        ))
        .map_err(lib)?;
        put(out, Box::into_raw(Box::new(PexSystem(m.system))), "out")
    })
}

/// Schrödinger truncation with damping on `(a, b)`; state dimension `2 n_modes`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_system_schrodinger(
    n_modes: usize,
    a: f64,
    b: f64,
    out: *mut *mut PexSystem,
) -> PexStatus {
    guard(|| {
        let m = modal::build_schrodinger(&SchrodingerModalSpec {
            n_modes,
            omega: (a, b),
        })
        .map_err(lib)?;
        put(out, Box::into_raw(Box::new(PexSystem(m.system))), "out")
    })
}

/// State dimension, or 0 for a null handle.
///
/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pex_system_dim(sys: *const PexSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.dim())
}

/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_system_b_norm(sys: *const PexSystem, out: *mut f64) -> PexStatus {
    guard(|| put(out, handle(sys, "sys")?.0.b_norm(), "out"))
}

/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_system_kalman_index(
    sys: *const PexSystem,
    out: *mut usize,
) -> PexStatus {
    guard(|| {
        put(
            out,
            handle(sys, "sys")?.0.kalman_index().map_err(lib)?,
            "out",
        )
    })
}

/// # Safety
/// `sys` must come from a `pex_system_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pex_system_free(sys: *mut PexSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Exact simulation sampled every `dt_out` (plus signal breakpoints) on `[0, horizon]`.
///
/// # Safety
/// Handles must be live; `z0` must be valid for `n` reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_simulate(
    sys: *const PexSystem,
    sig: *const PexSignal,
    z0: *const f64,
    n: usize,
    horizon: f64,
    dt_out: f64,
    out: *mut *mut PexTrajectory,
) -> PexStatus {
    guard(|| {
        let s = handle(sys, "sys")?;
        let g = handle(sig, "sig")?;
        let z = DVector::from_column_slice(read(z0, n, "z0")?);
        let traj = s.0.simulate(&g.0, &z, horizon, dt_out).map_err(lib)?;
        put(out, Box::into_raw(Box::new(PexTrajectory(traj))), "out")
    })
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pex_trajectory_len(traj: *const PexTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Copies the sample times into `buf` (needs `pex_trajectory_len` slots).
///
/// # Safety
/// `traj` must be live; `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn pex_trajectory_times(
    traj: *const PexTrajectory,
    buf: *mut f64,
    len: usize,
) -> PexStatus {
    guard(|| copy_out(&handle(traj, "traj")?.0.times, buf, len))
}

/// Copies `V = |z|^2 / 2` at each sample into `buf`.
///
/// # Safety
/// `traj` must be live; `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn pex_trajectory_energies(
    traj: *const PexTrajectory,
    buf: *mut f64,
    len: usize,
) -> PexStatus {
    guard(|| copy_out(&handle(traj, "traj")?.0.energies, buf, len))
}

/// Copies the final state into `buf` (needs the system dimension).
///
/// # Safety
/// `traj` must be live; `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn pex_trajectory_final_state(
    traj: *const PexTrajectory,
    buf: *mut f64,
    len: usize,
) -> PexStatus {
    guard(|| copy_out(handle(traj, "traj")?.0.final_state().as_slice(), buf, len))
}

/// # Safety
/// `traj` must come from [`pex_simulate`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pex_trajectory_free(traj: *mut PexTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Traveling-wave solution on which damping localized in `(a, b)` never acts.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_counterexample(
    a: f64,
    b: f64,
    periods: usize,
    out: *mut PexCounterexample,
) -> PexStatus {
    guard(|| {
        let r = dalembert::counterexample_report((a, b), periods).map_err(lib)?;
        put(
            out,
            PexCounterexample {
                b_prime: r.b_prime,
                mu: r.mu,
                period: r.period,
                pe_ok: r.pe_ok,
                max_overlap: r.max_overlap,
                energy: r.energy,
                energy_drift: r.energy_drift,
                inert: r.inert,
            },
            "out",
        )
    })
}

/// Lower bound on the PE-class observability constant of the uniformly damped string.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_wave_pe_lower_bound(
    t: f64,
    mu: f64,
    lambda_min: f64,
    d0: f64,
    out: *mut f64,
) -> PexStatus {
    guard(|| {
        put(
            out,
            observability::wave_pe_lower_bound(t, mu, lambda_min, d0).map_err(lib)?,
            "out",
        )
    })
}

/// Decay certificate `(q, theta, M, gamma)` from an observability constant.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pex_certificate(
    c: f64,
    theta: f64,
    b_norm: f64,
    out: *mut PexCertificate,
) -> PexStatus {
    guard(|| {
        let cert = stability::certificate_from_constant(c, theta, b_norm).map_err(lib)?;
        put(
            out,
            PexCertificate {
                q: cert.q,
                theta: cert.theta,
                m: cert.m,
                gamma: cert.gamma,
            },
            "out",
        )
    })
}
