//! Shared error type.

use crate::weighting::SchemeId;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested closed form does not exist for this scheme.
    #[error("{scheme} has no {context}; use `{fallback}` instead")]
    Capability {
        scheme: SchemeId,
        context: String,
        fallback: String,
    },
    /// A computation produced a non-finite or non-convergent result.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// Invalid run configuration (bad file, inconsistent fields, ...).
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
