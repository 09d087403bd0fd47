//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("invalid interval sequence: {0}")]
    InvalidIntervals(String),

    #[error("invalid argument `{name}`: {message}")]
    InvalidArgument { name: &'static str, message: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state dimension {dim} exceeds the configured limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },

    #[error("A is not dissipative: largest eigenvalue of (A + A^T)/2 is {max_eig:e}")]
    NotDissipative { max_eig: f64 },

    #[error("pair (A, B) is uncontrollable: controllability rank {rank} < {dim}")]
    Uncontrollable { rank: usize, dim: usize },

    #[error("matrix is not positive semidefinite: eigenvalue {eig:e}")]
    NotPositiveSemidefinite { eig: f64 },

    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("constant c = {c} outside the admissible range (0, {max}]")]
    ConstantOutOfRange { c: f64, max: f64 },

    #[error("interval cost c_{index} = {cost} exceeds the necessary bound {bound}")]
    CostBound { index: usize, cost: f64, bound: f64 },

    #[error("T = {t} above the validity threshold {threshold}")]
    AboveThreshold { t: f64, threshold: f64 },
}

impl Error {
    pub(crate) fn arg(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            message: message.into(),
        }
    }
}
