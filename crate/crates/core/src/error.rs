use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("constraint mod {0} has no parts")]
    NoParts(u64),
    #[error("malformed constraint mod {p}: {reason}")]
    MalformedConstraint { p: u64, reason: String },
    #[error("epsilon {0} must lie strictly between 0 and 1")]
    Epsilon(String),
    #[error("empty prime range [{y_low}, {y_high}]")]
    PrimeRange { y_low: u64, y_high: u64 },
    #[error("prime {p} lies outside [{y_low}, {y_high}]")]
    PrimeOutsideRange { p: u64, y_low: u64, y_high: u64 },
    #[error("prime {0} constrained twice")]
    DuplicatePrime(u64),
    #[error("set elements must be sorted and distinct")]
    UnsortedSet,
    #[error("set element {value} exceeds n_max {n_max}")]
    SetOutOfRange { value: u64, n_max: u64 },
    #[error("GAP generator has lo > hi")]
    GapRange,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SieveError {
    #[error("brute-force sieve refuses n_max {n_max} (limit {limit})")]
    OracleTooLarge { n_max: u64, limit: u64 },
    #[error("short-progression intersection precondition failed: {0}; use the generic intersection")]
    ShortIntersection(String),
    #[error("worker pool: {0}")]
    Workers(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("GAP volume {volume} exceeds limit {limit}")]
    GapTooLarge { volume: u128, limit: u128 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("scale too small: best window holds {count} fractions (need at least {needed})")]
    ScaleTooSmall { count: usize, needed: usize },
    #[error("no prime in [{0}, {1}]")]
    NoPrime(u64, u64),
    #[error(transparent)]
    Type(#[from] TypeError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("{theorem} expects {expected}")]
    WrongTheorem { theorem: &'static str, expected: String },
    #[error("invalid check input: {0}")]
    Input(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubsetSumError {
    #[error("measure has {got} weights, modulus is {p}")]
    DimensionMismatch { got: usize, p: u64 },
    #[error("measure weights must be nonnegative and sum to 1")]
    InvalidMeasure,
    #[error("exact counts unavailable: set of size {0} uses the normalized profile")]
    NotExact(usize),
    #[error("set of size {size} exceeds the limit {limit}")]
    TooLarge { size: usize, limit: usize },
}
