use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("field of size {size} exceeds the cap of {cap} elements")]
    SizeCap { size: u128, cap: u64 },
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("modulus is reducible over its base field")]
    ReducibleModulus,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not in a quadratic tower over the requested base")]
    NotQuadraticTower,
    #[error("linearized polynomials have different bases ({0} vs {1})")]
    BaseMismatch(u64, u64),
    #[error("set is not a subspace: {0}")]
    NotSubspace(String),
    #[error("basis elements are linearly dependent")]
    DependentBasis,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// A postcondition that holds mathematically failed to verify.
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
