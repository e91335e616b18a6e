use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point has {got} coordinates, metric has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside the chart region of `{metric}`")]
    OutsideChart { metric: String },
    #[error("metric is not positive definite (eigenvalues in [{min:e}, {max:e}])")]
    NotPositiveDefinite { min: f64, max: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("metric `{0}` has no closed-form jet")]
    NoAnalyticJet(String),
    #[error("form degree ({p},{q}) exceeds dimension {n}")]
    DegreeOverflow { p: usize, q: usize, n: usize },
    #[error("contraction needs p,q ≥ 1, got ({p},{q})")]
    DegreeUnderflow { p: usize, q: usize },
    #[error("bidegree mismatch: ({0},{1}) vs ({2},{3})")]
    BidegreeMismatch(usize, usize, usize, usize),
    #[error("{what} is not real: imaginary part {imag:e}")]
    NonReal { what: &'static str, imag: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse metric id `{0}`")]
    BadMetricId(String),
    #[error("metric `{0}` has no compact integration domain")]
    NoCompactDomain(String),
    #[error("evaluation failed at sample {index}: {source}")]
    Sample { index: u64, source: Box<Error> },
}
