use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{value} is not a p-adic integer for p = {p}")]
    NotPAdicInteger { p: u64, value: String },

    #[error("radius must be nonnegative, got {0}")]
    InvalidRadius(String),

    #[error("{a} is not invertible modulo {p}^{precision}")]
    NotInvertible { a: String, p: u64, precision: u32 },

    #[error("ball is empty or a singleton")]
    DegenerateBall,

    #[error("ball is not contained in the p-adic units")]
    NotAUnitBall,

    #[error("digit vector does not represent a p-adic unit")]
    NotAUnit,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("fewer than {index} primes congruent to {residue} mod {modulus} below {cap}")]
    SearchCapExceeded { residue: u64, modulus: u64, index: usize, cap: u64 },

    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u64, right: u64 },

    #[error("invalid digits: {0}")]
    InvalidDigits(String),

    #[error("{0} lies outside [0, 1]")]
    OutOfRange(String),

    #[error("every digit equals p - 1, so the target is 1")]
    RepresentsOne,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("residue {b} is not a unit modulo {p}")]
    InvalidResidue { b: i64, p: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
