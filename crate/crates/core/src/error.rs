use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("invalid variation sequence: {0}")]
    InvalidVariations(String),

    #[error("invalid gamma sequence: {0}")]
    InvalidGamma(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid block schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation requires finite memory: {0}")]
    InfiniteMemory(String),

    #[error("enumeration budget exceeded: {needed} entries needed, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("potential is not normalized (deviation {deviation:.3e})")]
    NotNormalized { deviation: f64 },

    #[error("transfer matrix is not primitive: {0}")]
    NotPrimitive(String),

    #[error("sequence is not summable: {0}")]
    NotSummable(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed input rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidAlphabet(_)
                | Error::AlphabetMismatch(_)
                | Error::InvalidContext(_)
                | Error::InvalidVariations(_)
                | Error::InvalidGamma(_)
                | Error::InvalidDistribution(_)
                | Error::InvalidSchedule(_)
                | Error::InvalidArgument(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
