use thiserror::Error;

/// Errors surfaced by kernel operations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("zero base raised to a symbolic exponent")]
    ZeroBaseSymbolicExponent,
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("non-polynomial in basis: {0}")]
    NonPolynomial(String),
    #[error("logarithmic derivative unsupported: exponent depends on {0}")]
    LogDerivative(String),
    #[error("substitution key is not an atom: {0}")]
    NonAtomKey(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type KResult<T> = Result<T, KernelError>;
