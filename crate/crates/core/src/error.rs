use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input must be a positive integer, got 0")]
    Zero,

    #[error("{n} is outside the supported range {range}")]
    OutOfRange { n: u64, range: &'static str },

    #[error("{n} is not prime (divisible by {factor})")]
    NotPrime { n: u64, factor: u64 },

    #[error("modulus {0} must be an odd prime")]
    EvenModulus(u64),

    #[error("{g} is not a primitive root mod {p}")]
    NotPrimitiveRoot { g: u64, p: u64 },

    #[error("residue {0} is divisible by the modulus")]
    ZeroResidue(u64),

    #[error("modulus mismatch: expected {expected}, got {found}")]
    ModulusMismatch { expected: u64, found: u64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("exhaustive count too large: t_d = {t_d} exceeds {limit}")]
    CountTooLarge { t_d: u64, limit: u64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}
