use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("complex is not connected ({components} components)")]
    NotConnected { components: usize },

    #[error("disconnected configuration space: {0}")]
    DisconnectedConfigurationSpace(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("no group backend available: {0}")]
    BackendUnavailable(String),

    #[error("coset enumeration exceeded bound {bound}; group possibly infinite")]
    PossiblyInfiniteGroup { bound: usize },

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("connection is not flat (face {face} holonomy defect {defect:.3e})")]
    NonFlatConnection { face: usize, defect: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (max residual {residual:.3e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),

    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),

    #[error("decomposition failure: {0}")]
    DecompositionFailure(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
