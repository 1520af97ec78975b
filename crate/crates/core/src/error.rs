use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid geometry: {0}")]
    InvalidGeometry(String),

    #[error("field contains non-finite values")]
    NonFinite,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("physical constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("orientation not found: fewer than two spectral peaks above threshold")]
    OrientationNotFound,

    #[error("no carrier: reference analytic magnitude is zero")]
    NoCarrier,

    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    #[error("frequency band empty: no bins survived quality gating")]
    BandEmpty,

    #[error("frame sequence error: {0}")]
    Sequence(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("container format error: {0}")]
    Format(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
