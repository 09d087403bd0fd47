//! Simulation and certification toolkit for linear dissipative systems with
//! intermittently active damping
//!
//! ```text
//! z'(t) = A z(t) - alpha(t) B B^T z(t),   alpha(t) in [0, 1]
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`signals`]: exact piecewise-constant damping signals, persistent-excitation
//!   checks and the standard generators (periodic gates, Haraux gaps, interval trains).
//! - [`linsys`]: dissipative pairs `(A, B)`, exact per-cell propagation, energy
//!   accounting, the Kalman index and the gap estimate.
//! - [`modal`]: spectral truncations of the damped string and Schrödinger equation.
//! - [`dalembert`]: the traveling-wave solution on which a persistently excited
//!   localized damping never acts.
//! - [`observability`]: generalized observability constants over signal classes.
//! - [`stability`]: decay certificates, interval product bounds and the divergence
//!   criterion for interval excitation.
//! - [`scenario`]: the JSON scenario format and the batch runner behind the CLI.

// `!(x > 0.0)` style checks are kept because they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dalembert;
pub mod error;
pub mod linalg;
pub mod linsys;
pub mod lp;
pub mod modal;
pub mod observability;
pub mod quad;
pub mod scenario;
pub mod signals;
pub mod stability;

pub use error::{Error, Result};
pub use linsys::{LinearSystem, Trajectory};
pub use signals::{IntervalSequence, PeReport, Signal};

/// Crate version, embedded in every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
