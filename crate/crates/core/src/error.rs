use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed quantum numbers, out-of-range parameters, incompatible sectors.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration the implementation does not cover (e.g. exact blocks for M != 2).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// A closed-form result that only exists for a restricted parameter set.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// Non-finite values or a failed linear-algebra kernel during a computation.
    #[error("numerical failure at t = {time}: {reason}")]
    Numerical { time: f64, reason: String },

    /// Adaptive integration gave up (step-size collapse or step budget exhausted).
    #[error("integration failed at t = {time} with step {step:e}: {reason}")]
    Integration {
        time: f64,
        step: f64,
        reason: String,
    },

    #[error("eigen-solver failure: {0}")]
    EigenSolver(String),

    #[error("fit not applicable: {0}")]
    FitNotApplicable(String),

    /// Problem too large for a dense code path.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A cross-check between two independent routes failed.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures that originate in numerics rather than in the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical { .. }
                | Error::Integration { .. }
                | Error::EigenSolver(_)
                | Error::FitNotApplicable(_)
                | Error::Consistency(_)
                | Error::Resource(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
