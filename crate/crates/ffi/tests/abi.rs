use std::ffi::CStr;
use std::ptr;

use pexstab_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe { pex_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(pex_version()) };
    assert_eq!(v.to_str().unwrap(), pexstab::VERSION);
}

#[test]
fn signal_roundtrip_and_pe() {
    let bps = [1.0, 2.0];
    let vals = [0.0, 1.0];
    let mut sig = ptr::null_mut();
    let st = unsafe { pex_signal_piecewise(bps.as_ptr(), vals.as_ptr(), 2, 0.5, &mut sig) };
    assert_eq!(st, PexStatus::Ok);
    let mut v = 0.0;
    assert_eq!(unsafe { pex_signal_eval(sig, 1.5, &mut v) }, PexStatus::Ok);
    assert_eq!(v, 1.0);
    assert_eq!(
        unsafe { pex_signal_integral(sig, 0.0, 4.0, &mut v) },
        PexStatus::Ok
    );
    assert!((v - 2.0).abs() < 1e-15);
    let mut rep = PexPeReport::default();
    assert_eq!(
        unsafe { pex_signal_pe_check(sig, 2.0, 0.9, 4.0, &mut rep) },
        PexStatus::Ok
    );
    assert!(rep.holds);
    assert_eq!(rep.worst_window_start, 0.0);
    unsafe { pex_signal_free(sig) };
}

#[test]
fn errors_carry_codes_and_messages() {
    let bps = [1.0];
    let vals = [1.5];
    let mut sig = ptr::null_mut();
    let st = unsafe { pex_signal_piecewise(bps.as_ptr(), vals.as_ptr(), 1, 0.0, &mut sig) };
    assert_eq!(st, PexStatus::InvalidSignal);
    assert!(sig.is_null());
    assert!(last_error().contains("outside [0, 1]"), "{}", last_error());

    let st = unsafe { pex_signal_constant(1.0, ptr::null_mut()) };
    assert_eq!(st, PexStatus::NullPointer);

    let a = [0.1, 0.0, 0.0, -1.0];
    let b = [1.0, 0.0];
    let mut sys = ptr::null_mut();
    let st = unsafe { pex_system_new(a.as_ptr(), 2, b.as_ptr(), 1, &mut sys) };
    assert_eq!(st, PexStatus::NotDissipative);

    let mut c = 0.0;
    let st = unsafe { pex_wave_pe_lower_bound(1.0, 2.0, 9.0, 1.0, &mut c) };
    assert_eq!(st, PexStatus::Infeasible);
    unsafe { pex_signal_free(ptr::null_mut()) };
    unsafe { pex_system_free(ptr::null_mut()) };
    unsafe { pex_trajectory_free(ptr::null_mut()) };
}

#[test]
fn simulate_damped_oscillator() {
    let a = [0.0, 1.0, -1.0, 0.0];
    let b = [0.0, 1.0];
    let mut sys = ptr::null_mut();
    assert_eq!(
        unsafe { pex_system_new(a.as_ptr(), 2, b.as_ptr(), 1, &mut sys) },
        PexStatus::Ok
    );
    assert_eq!(unsafe { pex_system_dim(sys) }, 2);
    let mut k = 99;
    assert_eq!(
        unsafe { pex_system_kalman_index(sys, &mut k) },
        PexStatus::Ok
    );
    assert_eq!(k, 1);

    let mut sig = ptr::null_mut();
    assert_eq!(unsafe { pex_signal_constant(0.0, &mut sig) }, PexStatus::Ok);
    let z0 = [1.0, 0.0];
    let mut traj = ptr::null_mut();
    let st = unsafe { pex_simulate(sys, sig, z0.as_ptr(), 2, 1.0, 0.25, &mut traj) };
    assert_eq!(st, PexStatus::Ok);
    let n = unsafe { pex_trajectory_len(traj) };
    assert_eq!(n, 5);
    let mut e = vec![0.0; n];
    assert_eq!(
        unsafe { pex_trajectory_energies(traj, e.as_mut_ptr(), n) },
        PexStatus::Ok
    );
    assert!(e.iter().all(|v| (v - 0.5).abs() < 1e-12));
    let mut small = [0.0; 2];
    assert_eq!(
        unsafe { pex_trajectory_times(traj, small.as_mut_ptr(), 2) },
        PexStatus::BufferTooSmall
    );
    let mut zf = [0.0; 2];
    assert_eq!(
        unsafe { pex_trajectory_final_state(traj, zf.as_mut_ptr(), 2) },
        PexStatus::Ok
    );
    assert!((zf[0] - 1f64.cos()).abs() < 1e-12 && (zf[1] + 1f64.sin()).abs() < 1e-12);

    unsafe {
        pex_trajectory_free(traj);
        pex_signal_free(sig);
        pex_system_free(sys);
    }
}

#[test]
fn modal_builders() {
    let mut sys = ptr::null_mut();
    assert_eq!(
        unsafe { pex_system_schrodinger(3, 0.2, 0.6, &mut sys) },
        PexStatus::Ok
    );
    assert_eq!(unsafe { pex_system_dim(sys) }, 6);
    unsafe { pex_system_free(sys) };
    assert_eq!(
        unsafe { pex_system_wave_localized(4, 0.2, 0.6, &mut sys) },
        PexStatus::Ok
    );
    assert_eq!(unsafe { pex_system_dim(sys) }, 8);
    unsafe { pex_system_free(sys) };
    assert_eq!(
        unsafe { pex_system_wave_uniform(2, 1.0, &mut sys) },
        PexStatus::Ok
    );
    let mut bn = 0.0;
    assert_eq!(unsafe { pex_system_b_norm(sys, &mut bn) }, PexStatus::Ok);
    assert!((bn - 1.0).abs() < 1e-12);
    unsafe { pex_system_free(sys) };
    assert_eq!(
        unsafe { pex_system_wave_localized(4, 0.6, 0.2, &mut sys) },
        PexStatus::InvalidArgument
    );
}

#[test]
fn counterexample_and_certificate() {
    let mut r = PexCounterexample::default();
    assert_eq!(
        unsafe { pex_counterexample(0.2, 0.6, 3, &mut r) },
        PexStatus::Ok
    );
    assert!(r.inert && r.pe_ok);
    assert_eq!(r.max_overlap, 0.0);
    assert!(r.energy_drift <= 1e-8);

    let mut c = PexCertificate::default();
    assert_eq!(
        unsafe { pex_certificate(1.0, 1.0, 1.0, &mut c) },
        PexStatus::Ok
    );
    assert!((c.q - 0.5).abs() < 1e-15 && (c.m - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(
        unsafe { pex_certificate(0.0, 1.0, 1.0, &mut c) },
        PexStatus::InvalidArgument
    );
}
