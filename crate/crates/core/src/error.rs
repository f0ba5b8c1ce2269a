use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sequence spec: {0}")]
    InvalidSpec(String),

    #[error("sequence term {index} is not positive")]
    NonPositiveTerm { index: usize },

    #[error("sequence index {index} is past the end of an explicit sequence of length {len}")]
    OutOfRange { index: usize, len: usize },

    /// An argument outside the mathematical domain of the operation (e.g. `E ≤ 0`).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("dimension {dim} exceeds the supported maximum of {max}")]
    Dimension { dim: usize, max: usize },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("numerical breakdown: {0}")]
    Breakdown(String),

    #[error("resolution too coarse: {0}")]
    CoarseResolution(String),

    #[error("malformed domain document: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }
}

pub(crate) fn check_energy<T: crate::Real>(e: T) -> Result<()> {
    if e > T::zero() && e.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "energy must be positive and finite, got {e}"
        )))
    }
}
