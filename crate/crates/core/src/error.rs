use thiserror::Error;

/// Errors raised by the simulator and the classical helpers around it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("register of {requested} qubits exceeds the capacity of {max} qubits")]
    Capacity { requested: usize, max: usize },

    #[error("{a} has no inverse modulo {n}")]
    NotInvertible { a: u64, n: u64 },

    #[error("unsupported character {0:?}")]
    UnsupportedCharacter(char),

    #[error("length mismatch: message has {message} symbols, key has {key}")]
    LengthMismatch { message: usize, key: usize },

    #[error("block {block} is not smaller than the modulus {n}")]
    BlockOutOfRange { block: u64, n: u64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("primes are not distinct: p = q = {0}")]
    PrimesNotDistinct(u64),

    #[error("{0} is not composite")]
    NotComposite(u64),

    #[error("eigenstate check failed: residual {residual:e} exceeds {tolerance:e}")]
    NotEigenstate { residual: f64, tolerance: f64 },

    #[error("no factor found after {attempts} attempts")]
    AttemptsExhausted { attempts: usize, log: Vec<String> },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
