use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: i64, m: i64 },

    #[error("invalid modulus {0}: {1}")]
    InvalidModulus(i64, &'static str),

    #[error("invalid form ({a}, {b}, {c}): {reason}")]
    InvalidForm {
        a: i64,
        b: i64,
        c: i64,
        reason: &'static str,
    },

    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("prime {q} does not split in Q(sqrt({disc})): kronecker = {symbol}")]
    NotSplit { q: i64, disc: i64, symbol: i32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pole of the gamma function at {0}")]
    GammaPole(f64),

    #[error("quadrature did not reach tolerance: best estimate {estimate}, error {error:e}")]
    Quadrature { estimate: num_complex::Complex64, error: f64 },

    #[error("reduction did not converge after {0} steps")]
    NoConvergence(usize),

    #[error("not enough coefficients: have {have}, need {need}")]
    InsufficientCoefficients { have: usize, need: usize },

    #[error("size guard: {0}")]
    TooLarge(String),

    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;
