use thiserror::Error;

use crate::numeric::PositiveRational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("denominator must be at least 1")]
    ZeroDenominator,

    #[error("invalid rational literal `{0}` (expected `n` or `n/d` with decimal digits)")]
    InvalidLiteral(String),

    #[error("prime index {requested} exceeds the sieve capacity of {capacity} primes")]
    PrimeCapacityExceeded { requested: u64, capacity: usize },

    #[error("{what}: more than {cap} elements (raise the element cap to continue)")]
    ElementCapExceeded { what: String, cap: usize },

    #[error("more than {cap} factorizations of {x}")]
    FactorizationCapExceeded { x: PositiveRational, cap: usize },

    #[error("{0} is not an element of the monoid")]
    NotInMonoid(PositiveRational),

    #[error("depth must be at least 1")]
    InvalidDepth,

    #[error("epsilon must be positive")]
    ZeroEpsilon,

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("factorization views have mixed lengths ({first} and {other})")]
    MixedLengths { first: usize, other: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid generator specification: {0}")]
    InvalidSpec(String),

    #[error("removal set is not contained in the generating set: {0} is not a generator")]
    NotASubset(PositiveRational),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Guard trips are resource limits, not bad input.
    pub fn is_guard_trip(&self) -> bool {
        matches!(
            self,
            Error::ElementCapExceeded { .. } | Error::FactorizationCapExceeded { .. }
        )
    }
}
