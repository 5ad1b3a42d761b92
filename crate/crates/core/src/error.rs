use thiserror::Error;

/// Errors raised by the geometry, search and report layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),

    #[error("field order {p}^{h} is outside the supported range (q <= 32)")]
    FieldTooLarge { p: u32, h: u32 },

    #[error("modulus must be monic of degree {expected}, got coefficients {got:?}")]
    BadModulusDegree { expected: u32, got: Vec<u32> },

    #[error("modulus coefficient {0} is not reduced mod p")]
    BadCoefficient(u32),

    #[error("modulus {modulus:?} is reducible: divisible by {factor:?}")]
    ReducibleModulus { modulus: Vec<u32>, factor: Vec<u32> },

    #[error("{0} is not a prime power in 2..=32")]
    NotPrimePower(u32),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
