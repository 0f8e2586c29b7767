use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("no prime in [{lo}, {hi}]")]
    NoPrimeInRange { lo: u64, hi: u64 },

    #[error("element {0} is not invertible")]
    NotInvertible(i128),

    #[error("extension field too large: {0}")]
    TooLarge(String),

    #[error("no element of order >= {wanted} (group order {available})")]
    OrderUnavailable { wanted: u64, available: u64 },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: String, right: String },

    #[error("integer magnitude bound exceeded: {0}")]
    MagnitudeOverflow(String),

    #[error("matrix is zero, no sparse line exists")]
    NoWitness,

    #[error("field too small: {0}")]
    FieldTooSmall(String),

    #[error("evaluation points are not pairwise distinct")]
    DegeneratePoints,

    #[error("input too large for brute-force oracle: {0}")]
    TooLargeForOracle(String),

    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    #[error("instance has a non-zero C, expected an all-zeroes instance")]
    NotAllZeroesForm,

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("invalid ring token `{0}`")]
    InvalidRing(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the CLI for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::InvalidRing(_)
            | Error::RingMismatch { .. }
            | Error::DimMismatch(_)
            | Error::NotAllZeroesForm
            | Error::Config(_)
            | Error::Io(_) => 65,
            Error::InvalidArgument(_) => 64,
            _ => 70,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
