use std::path::PathBuf;

/// Everything that can go wrong in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("no positive launch: {0}")]
    NoPositiveLaunch(String),

    #[error("unbounded equilibrium: {0}")]
    UnboundedEquilibrium(String),

    #[error("no convergence after {iterations} iterations (last change {last_change:e}): {what}")]
    Convergence {
        what: String,
        iterations: usize,
        last_change: f64,
    },

    #[error("no sign change of the function on [{lo:e}, {hi:e}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for the numerical failures (no convergence, no bracket).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::NoBracket { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
