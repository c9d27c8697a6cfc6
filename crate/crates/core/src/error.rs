use thiserror::Error;

/// Errors produced by the henonlab library.
#[derive(Debug, Error)]
pub enum HenonError {
    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("non-finite input: {0}")]
    Domain(String),

    #[error("map is not invertible (b = 0)")]
    NotInvertible,

    #[error("filtration search exceeded cap at R = {radius}: {detail}")]
    FiltrationSearch { radius: f64, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("orbit escaped after {steps} steps")]
    OrbitEscaped { steps: usize },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("{0}")]
    NotFound(String),

    #[error("certificate: {0}")]
    Certificate(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HenonError>;
