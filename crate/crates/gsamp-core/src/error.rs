//! Crate-wide error type.

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by graph construction, spectral estimation, sampling and
/// reconstruction.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A structurally valid request with out-of-range parameters
    /// (e.g. `k >= n` for a knn graph, bandwidth larger than the graph).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input data that cannot be used (NaN coordinates, all-zero sampling
    /// weights, missing labels, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A sampling kernel that is not strictly positive on the spectral
    /// interval.
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    /// Malformed serialized data; `line` is 1-based where applicable.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidInput(_) => "invalid_input",
            Error::InvalidKernel(_) => "invalid_kernel",
            Error::Parse { .. } => "parse_error",
            Error::Io(_) => "io_error",
        }
    }
}
