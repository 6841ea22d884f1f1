use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("support is empty")]
    EmptySupport,
    #[error("support exponents must be strictly increasing: {0:?}")]
    UnsortedSupport(Vec<u32>),
    #[error("factor support must contain the exponent 0: {0:?}")]
    UnnormalizedSupport(Vec<u32>),
    #[error("exponent {0} out of range")]
    ExponentOutOfRange(i64),
    #[error("circuit has no terms")]
    EmptyCircuit,
    #[error("term {0} has no factors")]
    EmptyTerm(usize),
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("coefficient is not finite: {0}")]
    NonFiniteCoefficient(f64),
    #[error("dense degree {degree} exceeds the cap {cap}; use the subdivision counter")]
    DegreeCapExceeded { degree: usize, cap: usize },
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("pivot term {0} does not exist or has a nonzero degree shift")]
    InvalidPivot(usize),
    #[error("product-of-Gaussians density is only evaluated for 1 <= k <= 5 (got {0})")]
    UnsupportedProductOrder(usize),
    #[error("density of a product of {0} Gaussians is unbounded at 0")]
    SingularAtZero(usize),
    #[error("parameter {name} out of range: {value}")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("function is not positive at x = {0}")]
    NonPositive(f64),
    #[error("evaluation point x = {0} is outside the admissible domain")]
    OutsideDomain(f64),
    #[error("config: {field}: {message}")]
    Config { field: String, message: String },
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
