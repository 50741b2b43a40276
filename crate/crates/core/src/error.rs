use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, PgdError>;

#[derive(Debug, Error)]
pub enum PgdError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("incompatible initial data: {0}")]
    IncompatibleInitialData(String),

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("enrichment breakdown: {0}")]
    EnrichmentBreakdown(String),

    #[error("degenerate mode: {0}")]
    DegenerateMode(String),

    #[error("temporal update failed: {0}")]
    UpdateFailure(String),

    #[error("reference field has zero norm")]
    UndefinedReference,

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl PgdError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        PgdError::InvalidArgument(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        PgdError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for failures raised by a numerical solve rather than by bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            PgdError::SolverFailure(_)
                | PgdError::EnrichmentBreakdown(_)
                | PgdError::DegenerateMode(_)
                | PgdError::UpdateFailure(_)
        )
    }
}
