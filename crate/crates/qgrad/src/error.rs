//! Error type shared across the crate.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller violated an operation precondition (bad interval, q = 1, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configuration failed validation before any iteration ran.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Objective name not present in the registry.
    #[error("unknown function `{name}`; valid names: {valid}")]
    UnknownFunction { name: String, valid: String },

    /// The objective returned NaN or infinity where a finite value is required.
    #[error("non-finite objective value: {0}")]
    NonFiniteObjective(String),

    /// I/O failure, annotated with the destination path.
    #[error("i/o error on `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
