use thiserror::Error;

/// Errors produced by the solvers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A numerical routine failed (non-convergence, lost definiteness, ...).
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// An iterative solver hit its iteration cap before closing the gap.
    #[error("no convergence after {iterations} iterations (best gap {best_gap:.3e})")]
    Convergence { iterations: usize, best_gap: f64 },

    /// The single-antenna stationarity system has no root with a price above cost.
    #[error("no interior equilibrium: {0}")]
    NoInteriorEquilibrium(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// True for errors caused by bad inputs or configuration rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation(_) | Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
