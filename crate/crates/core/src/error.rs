use thiserror::Error;

use crate::config::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(ValidationReport),
    #[error("parse error: {0}")]
    Parse(String),
    /// The parameters are valid but the requested quantity is undefined there
    /// (for example `a <= m_e`, or the high-SNR metric outside its domain).
    #[error("unsupported regime: {0}")]
    Unsupported(String),
    /// The quantity grows without bound at these parameters.
    #[error("divergent: {0}")]
    Divergent(String),
    /// A scalar argument is outside the domain of a closed form.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid sweep: {0}")]
    Sweep(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
