use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("outside the model's validity regime: {0}")]
    ValidityRegime(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{0} requires periodic boundary conditions")]
    NeedsPeriodic(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("saddle solver: no sign change for y0 in [{lo:e}, {hi:e}] (saturated: {saturated})")]
    NoSignChange { lo: f64, hi: f64, saturated: bool },

    #[error("metropolis tuning failed: acceptance {acceptance:.3} outside [0.05, 0.95]")]
    Tuning { acceptance: f64 },

    #[error("non-finite energy encountered at sweep {sweep}")]
    NonFiniteEnergy { sweep: usize },

    #[error("eigen-solver did not converge (condition estimate {condition:e})")]
    Diagonalization { condition: f64 },

    #[error("spectrum grid does not cover [{need_min}, {need_max}]")]
    Coverage { need_min: f64, need_max: f64 },

    #[error("{failed} of {total} realizations failed")]
    PartialFailure { failed: usize, total: usize },

    #[error("nothing to plot in {0}")]
    NothingToPlot(PathBuf),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("plot rendering: {0}")]
    Plot(String),
}

impl Error {
    /// Process exit code: 1 validation, 2 solver/tuning failure, 3 partial-failure threshold.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoSignChange { .. }
            | Error::Tuning { .. }
            | Error::NonFiniteEnergy { .. }
            | Error::Diagonalization { .. } => 2,
            Error::PartialFailure { .. } => 3,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
