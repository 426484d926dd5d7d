//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("shape mismatch in {context}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    ShapeMismatch {
        context: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("matrix is not Hermitian: max asymmetry {max_asymmetry:.3e} exceeds tolerance {tolerance:.1e}")]
    NotHermitian { max_asymmetry: f64, tolerance: f64 },

    #[error("matrix is not unitary: deviation {deviation:.3e} exceeds tolerance {tolerance:.1e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("dimension {requested} exceeds cap {cap} in {context}")]
    DimensionCap {
        context: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("index {index} out of range for {context} of size {bound}")]
    IndexOutOfRange {
        context: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("invalid {context}: {reason}")]
    Invalid { context: &'static str, reason: String },

    #[error("state registry overflow: cap of {cap} reference states reached")]
    RegistryOverflow { cap: usize },

    #[error("state key {key} not present in table")]
    UnknownStateKey { key: usize },

    #[error("distribution not normalized in {context}: sum is {sum}")]
    NotNormalized { context: &'static str, sum: f64 },

    #[error("empty action plan")]
    EmptyPlan,
}

impl Error {
    pub(crate) fn invalid(context: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            context,
            reason: reason.into(),
        }
    }
}
