use thiserror::Error;

/// Errors raised by the constructions, validators and oracles in this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not {kind}-diagonal: nonzero entry at ({row}, {col})")]
    BandViolation {
        kind: &'static str,
        row: usize,
        col: usize,
    },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative input: {0}")]
    NegativeInput(String),

    #[error("value {value} does not fit into {width} base-{base} digits")]
    DigitOverflow {
        value: String,
        base: String,
        width: usize,
    },

    #[error("vector is not a feasible solution: {0}")]
    Infeasible(String),

    #[error("instance is too large: {0}")]
    TooLarge(String),

    #[error("search budget of {0} nodes exhausted")]
    BudgetExceeded(u64),

    #[error("graver set is truncated at norm cap {0}")]
    Truncated(String),

    #[error("structure validation failed: {0}")]
    Validation(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
