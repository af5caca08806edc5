use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {p}^{n} exceeds the supported maximum of 2^16 elements")]
    FieldTooLarge { p: u64, n: u32 },
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("modulus {0} is reducible over the prime field")]
    ReducibleModulus(String),
    #[error("element index {index} out of range for a field of order {q}")]
    ElementOutOfRange { index: u64, q: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires a field of odd order (got q = {0})")]
    RequiresOddOrder(u32),
    #[error("operation requires a field of square order (got q = {0})")]
    RequiresSquareOrder(u32),
    #[error("degree bounds differ ({0} vs {1})")]
    DegreeMismatch(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("family has no common point")]
    NoCommonPoint,
    #[error("family is not {0}-intersecting")]
    NotIntersecting(usize),
    #[error("empty input: {0}")]
    Empty(&'static str),
}
