use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation (t ≤ 0, z outside
    /// the similarity interval, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Family parameters violate their validity constraints.
    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("singular diffusion profile at z = {z}")]
    Singularity { z: f64 },

    #[error("profile is not normalizable: {0}")]
    NonNormalizable(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical instability at t = {t}: {reason}")]
    Instability { t: f64, reason: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
