use thiserror::Error;

/// Errors raised across the library. The CLI maps each variant onto an exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("certificate unavailable: {0}")]
    CertificateUnavailable(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
