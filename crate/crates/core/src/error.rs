use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid horizon {0}: {1}")]
    InvalidHorizon(u64, &'static str),

    #[error("policy `{policy}` selected arm {arm} at round {round}, but the instance has {k} arms")]
    PolicyContractViolation {
        policy: String,
        arm: usize,
        round: u64,
        k: usize,
    },

    #[error("ensemble mismatch: {0}")]
    EnsembleMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("not enough data: {usable} usable points, need at least 3")]
    NotEnoughData { usable: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Errors caused by the user's input rather than by a failed run.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidInstance(_)
                | Error::InvalidHorizon(..)
                | Error::InvalidParameter(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
