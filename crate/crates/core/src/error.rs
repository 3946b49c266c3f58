use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("modulus {n} is too small (need n >= {min})")]
    ModulusTooSmall { n: u64, min: u64 },
    #[error("zero has no {0}")]
    ZeroElement(&'static str),
    #[error("c = {c} is ineligible for n = {n}: {rule}")]
    IneligibleC { n: u64, c: u64, rule: &'static str },
    #[error("{k} does not divide {r}")]
    NotADivisor { k: usize, r: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("mixed cyclotomic conductors {0} and {1}")]
    MixedConductor(usize, usize),
    #[error("matrix is singular (witness k = {witness_k})")]
    Singular { witness_k: usize },
    #[error("block ({row}, {col}) is not circulant")]
    NotCirculant { row: usize, col: usize },
    #[error("expected {expected} leaders, found {found}")]
    LeaderCount { expected: usize, found: usize },
    #[error("methods disagree: {0}")]
    Disagreement(String),
    #[error("malformed record: {0}")]
    Format(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
