use thiserror::Error;

/// Errors raised by the library.
///
/// Input errors (`NotPrime`, `ZeroA`, ...) are the caller's fault; the
/// `*Failed` / `Counterexample` variants mean a mathematical check did not
/// hold and carry enough context to reproduce it.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("a must be nonzero")]
    ZeroA,

    #[error("a = {a} is a multiple of p = {p}")]
    AMultipleOfP { p: u64, a: i64 },

    #[error("p - a = 0 (p = {p}, a = {a})")]
    ZeroComplement { p: u64, a: i64 },

    #[error("n must be at least {min}, got {n}")]
    NTooSmall { n: u64, min: u64 },

    #[error("U_n for a = {a}, n = {n} has a non-integer coefficient at index {index}: {value}")]
    NonIntegerCoefficient {
        a: i64,
        n: u64,
        index: usize,
        value: String,
    },

    #[error("R_n for a = {a}, n = {n} has a nonzero coefficient at degree {degree}: {value}")]
    VanishingFailed {
        a: i64,
        n: u64,
        degree: usize,
        value: String,
    },

    #[error(
        "lemma counterexample at n = {n}: 2·(s_2(n) + floor(log_2 n)) = {lhs_doubled} > n + 1"
    )]
    Lemma1Counterexample { n: u64, lhs_doubled: u64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// `true` for errors caused by bad input rather than a failed check.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NotPrime(_)
                | Error::ZeroA
                | Error::AMultipleOfP { .. }
                | Error::ZeroComplement { .. }
                | Error::NTooSmall { .. }
                | Error::Invalid(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
