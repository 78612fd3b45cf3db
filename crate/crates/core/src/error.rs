use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {order} exceeds the configured bound {bound}")]
    FieldTooLarge { order: u64, bound: u64 },
    #[error("group over GF({q}) exceeds the materialization bound {bound}")]
    GroupTooLarge { q: u32, bound: u32 },
    #[error("zero has no multiplicative inverse")]
    DivisionByZero,
    #[error("squareness is only defined for nonzero elements of odd-order fields")]
    SquareUndefined,
    #[error("PGL(2,q) is only distinguished from PSL(2,q) for odd q")]
    PglNeedsOddQ,
    #[error("invalid tuple: {0}")]
    InvalidTuple(String),
    #[error("structural error: {0}")]
    Structure(String),
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("generator r{index} out of range for {ngens} generators")]
    GeneratorOutOfRange { index: usize, ngens: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coset table is not closed")]
    NotClosed,
}
