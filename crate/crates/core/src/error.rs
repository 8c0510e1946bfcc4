use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid edge {edge:?}: {reason}")]
    InvalidEdge { edge: Vec<usize>, reason: String },

    #[error("density is undefined for a hypergraph without edges")]
    EmptyHypergraph,

    #[error("uniformity mismatch: host is {host}-uniform but pattern is {pattern}-uniform")]
    UniformityMismatch { host: usize, pattern: usize },

    #[error("ordering mismatch: host is {host} but pattern is {pattern}")]
    ModeMismatch { host: crate::Mode, pattern: crate::Mode },

    #[error("{what} is {size}, which exceeds the configured limit of {limit}")]
    TooLarge { what: &'static str, size: u128, limit: u128 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
