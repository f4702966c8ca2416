use thiserror::Error;

/// Errors raised by sample construction, statistics and the p-value engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("observation {value} lies outside the bin range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("parameter estimation failed: {0}")]
    EstimationFailure(String),

    #[error("unsupported method: {0}")]
    UnsupportedMethod(String),

    #[error("model error: {0}")]
    ModelError(String),

    #[error("degenerate binning: {0}")]
    DegenerateBinning(String),

    #[error("discrete samples do not share a support")]
    SupportMismatch,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by how the tool was invoked rather than by the data.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedMethod(_) | Error::NotFound(_) | Error::InvalidParameter(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
