use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no convergence after {iterations} iterations: {what}")]
    NoConvergence { what: String, iterations: usize },

    #[error("grid too small: Thomas-Fermi radius {tf_radius:.3} exceeds 0.8 x half-width {half_width:.3}")]
    GridTooSmall { tf_radius: f64, half_width: f64 },

    #[error("non-finite field values after {step} steps{}", component.map(|m| format!(" in number component m = {m}")).unwrap_or_default())]
    NonFinite { step: usize, component: Option<f64> },

    #[error("numerical integrity check failed: {0}")]
    Integrity(String),

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
