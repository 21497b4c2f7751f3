//! Error type shared by every module, with the exit-code mapping used by the CLI.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure kinds reported by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// A correlation was evaluated outside its validity range.
    #[error("domain error in {what}: {detail}")]
    Domain {
        /// Correlation or quantity being evaluated.
        what: &'static str,
        /// Offending value and admissible range.
        detail: String,
    },
    /// A configuration or input value violates a constraint.
    #[error("invalid configuration: {0}")]
    Validation(String),
    /// The physical state is inadmissible (for example a saturated channel).
    #[error("inadmissible state: {0}")]
    State(String),
    /// The requested operating point cannot be sustained.
    #[error("infeasible operating point: {0}")]
    Infeasible(String),
    /// A numerical method failed to converge or produced a non-finite value.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Filesystem or CSV failure.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Builds a [`Error::Domain`] value.
    pub fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }

    /// Process exit code associated with this failure kind.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Domain { .. } => 2,
            Error::Infeasible(_) | Error::State(_) => 3,
            Error::Numerical(_) => 4,
            Error::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
