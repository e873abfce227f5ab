use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("probabilities must be finite and nonnegative and sum to 1 (sum = {sum})")]
    NotAProbability { sum: f64 },
    #[error("offspring law is not critical: mean m = {mean} (|m - 1| must be <= 1e-9)")]
    NotCritical { mean: f64 },
    #[error("offspring law is degenerate: p_0 + p_1 = {p01} must lie strictly between 0 and 1")]
    DegenerateOffspring { p01: f64 },
    #[error("immigration law never produces immigrants (b_0 = 1)")]
    NoImmigration,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("particle cap of {cap} records exceeded")]
    ResourceLimit { cap: usize },
    #[error("history enumeration exceeded the cap of {cap} histories")]
    Explosion { cap: usize },
    #[error("point sample is empty (no clans and no immigration atoms)")]
    EmptySample,
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceLimit { .. } | Error::Explosion { .. } => 3,
            _ => 2,
        }
    }
}
