use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AggError {
    #[error("time series set is empty")]
    Empty,
    #[error("attribute `{name}` has {got} steps, expected {expected}")]
    RaggedRow {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("attribute `{name}` has a non-finite value at step {step}")]
    NonFinite { name: String, step: usize },
    #[error("duplicate attribute name `{0}`")]
    DuplicateAttribute(String),
    #[error("step_hours must be positive and finite, got {0}")]
    BadStepHours(f64),
    #[error("attribute `{0}` has no normalization parameters")]
    MissingParams(String),
    #[error("normalized value {value} of attribute `{name}` lies outside [0, 1]")]
    OutOfUnitRange { name: String, value: f64 },
    #[error("{n_steps} steps are not divisible by period length {period_length}")]
    NotDivisible { n_steps: usize, period_length: usize },
    #[error("period length must be at least 1")]
    ZeroPeriodLength,
    #[error("cluster count {k} outside 1..={n}")]
    ClusterCount { k: usize, n: usize },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("horizon mismatch: clustering covers {covered} steps, expected {expected}")]
    HorizonMismatch { covered: usize, expected: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}
