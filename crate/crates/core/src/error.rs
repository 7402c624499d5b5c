use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The factorizer gave up on a cofactor within its effort budget.
    #[error("factorization budget exceeded on a {bits}-bit cofactor")]
    FactorizationBudgetExceeded { bits: u64 },

    #[error("invalid root: {0}")]
    InvalidRoot(String),

    /// Certification of a partial quotient failed even at the largest allowed precision.
    #[error("precision exhausted after certifying {certified} of {requested} terms at {bits} bits")]
    PrecisionExhausted {
        requested: usize,
        certified: usize,
        bits: u64,
    },

    #[error("degenerate resulting equation (d = 0)")]
    DegenerateEquation,

    #[error("triple ({a}, {b}, {c}) is not pairwise coprime")]
    NotCoprime { a: String, b: String, c: String },

    #[error("approximation gain undefined: log argument of the denominator is 1")]
    GainUndefined,

    #[error("bound undefined: {0}")]
    BoundUndefined(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed record on line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
