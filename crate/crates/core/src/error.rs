use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inputs have incompatible shapes or sizes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An input violates a structural invariant (normalization, orthogonality, ...).
    #[error("validation failed: {0}")]
    Validation(String),

    /// A numerical routine failed or produced out-of-contract output.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An experiment or model configuration is not admissible.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A CSV file does not carry the columns a consumer expects.
    #[error("schema mismatch in {path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("plot rendering failed: {0}")]
    Plot(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
