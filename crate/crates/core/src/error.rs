use thiserror::Error;

/// Library-wide error type. Variants map onto the CLI exit-code contract:
/// validation errors exit 2, budget exhaustion exits 3, not-found exits 4.
#[derive(Debug, Error)]
pub enum RosaError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("search budget exceeded: {0}")]
    Budget(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl RosaError {
    pub fn validation(msg: impl Into<String>) -> Self {
        RosaError::Validation(msg.into())
    }

    /// Exit code for the CLI contract (0 success, 2 validation, 3 budget, 4 not-found).
    pub fn exit_code(&self) -> i32 {
        match self {
            RosaError::Validation(_) | RosaError::Json(_) => 2,
            RosaError::Budget(_) => 3,
            RosaError::NotFound(_) => 4,
            RosaError::Internal(_) | RosaError::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, RosaError>;
