use num_bigint::BigUint;
use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("field modulus {0} is not a prime")]
    InvalidModulus(u32),

    #[error("coefficient {value} is not reduced modulo {modulus}")]
    CoefficientOutOfRange { value: u32, modulus: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid server: {0}")]
    InvalidServer(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("{what} = {value} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("construction needs {required} columns, above the size guard of {limit}")]
    SizeGuard { required: BigUint, limit: u64 },

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
