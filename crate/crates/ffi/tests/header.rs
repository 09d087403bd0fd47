//! The generated header compiles as C and declares every exported symbol.

use std::path::PathBuf;
use std::process::Command;

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/pexstab.h")
}

#[test]
fn declares_exports() {
    let text = std::fs::read_to_string(header()).expect("header is generated by build.rs");
    for sym in [
        "pex_version",
        "pex_last_error_message",
        "pex_signal_piecewise",
        "pex_signal_pe_check",
        "pex_system_new",
        "pex_system_schrodinger",
        "pex_simulate",
        "pex_trajectory_energies",
        "pex_counterexample",
        "pex_wave_pe_lower_bound",
        "pex_certificate",
        "PEX_STATUS_BUFFER_TOO_SMALL",
        "typedef struct PexSignal PexSignal;",
    ] {
        assert!(text.contains(sym), "missing {sym}");
    }
}

#[test]
fn compiles_as_c() {
    let Ok(out) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"pexstab.h\"\nint main(void) { PexSignal *s = 0; \
         PexStatus st = pex_signal_constant(1.0, &s); pex_signal_free(s); return (int)st; }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header().parent().unwrap())
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}
