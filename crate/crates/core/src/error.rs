use thiserror::Error;

use crate::syntax::ParseError;

/// Errors raised by the exact-arithmetic layers and the structure and solver modules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("value does not fit in a double: {0}")]
    Overflow(String),
    #[error("polynomials are not coprime (gcd = {0})")]
    NotCoprime(String),
    #[error("duplicate root {0} in factored form")]
    DuplicateRoot(String),
    #[error("leading coefficient must be nonzero")]
    ZeroLead,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("lambda = 0 is not allowed for the shift operator (ker S^m is not a polynomial-exponential space)")]
    ShiftZeroLambda,
    #[error("index out of range: {0}")]
    Index(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("subspace is not invariant under the base operator")]
    NotInvariant,
    #[error("operation requires a nonzero subspace")]
    ZeroSpace,
    #[error("element does not belong to the subspace")]
    NotMember,
    #[error("invalid minimal polynomial: {0}")]
    InvalidMinPoly(String),
    #[error("operator is not factored over the Gaussian rationals; supply its roots (e.g. roots=2^1,3^1)")]
    Unfactored,
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("expected {expected} initial values, got {got}")]
    WrongInitialCount { expected: usize, got: usize },
    #[error("initial-value system is singular")]
    Singular,
    #[error("supplied roots do not reproduce the operator: expected {expected}, roots give {got}")]
    RootsMismatch { expected: String, got: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
