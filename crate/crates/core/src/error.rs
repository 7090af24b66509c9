use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum CastError {
    #[error("load error: {0}")]
    Load(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("split error: {0}")]
    Split(String),

    #[error("classifier error: {0}")]
    Classifier(String),

    /// Training labels contain fewer than two distinct classes.
    #[error("cannot fit a classifier on a single class (class {0})")]
    SingleClass(usize),

    #[error("density estimation error: {0}")]
    Density(String),

    #[error("quadrature did not converge (partial estimate {partial})")]
    Quadrature { partial: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CastError>;
