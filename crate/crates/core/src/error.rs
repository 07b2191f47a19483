use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector is empty")]
    Empty,

    #[error("entries sum to {sum}, not 1")]
    NotNormalized { sum: f64 },

    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },

    #[error("entry {index} is not finite")]
    NonFinite { index: usize },

    #[error("empty collection")]
    EmptyCollection,

    #[error(
        "state `{state}` has Schmidt rank {target_rank}, exceeding source rank {source_rank}; \
         conversion probability is zero"
    )]
    RankDeficit {
        state: String,
        source_rank: usize,
        target_rank: usize,
    },

    #[error("measurement branch `{branch}` has vanishing probability")]
    DegenerateBranch { branch: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Kraus diagonals violate completeness at index {index} (m^2 + n^2 = {value})")]
    IncompleteKraus { index: usize, value: f64 },

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
