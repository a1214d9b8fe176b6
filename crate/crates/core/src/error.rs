use alloc::string::String;

/// Errors raised by the constructors and operations of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    /// A coefficient would exceed the representable range (|x| > 1e300).
    #[error("truncation overflow at degree {degree}: coefficient magnitude exceeds 1e300")]
    TruncationOverflow { degree: usize },

    #[error("non-finite entry encountered")]
    NonFinite,

    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),

    #[error("invalid symbol triple: {0}")]
    InvalidSymbol(String),

    #[error("invalid conjugation parameters: {0}")]
    InvalidConjugation(String),

    #[error("degree budget {budget} plus order {order} exceeds truncation {truncation}")]
    DegreeBudget {
        budget: usize,
        order: usize,
        truncation: usize,
    },

    #[error("kernel order {k} is below the relation order {m}")]
    KernelOrder { k: usize, m: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = core::result::Result<T, Error>;
