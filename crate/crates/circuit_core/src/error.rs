use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("angular frequency must be positive and finite, got {0}")]
    NonPositiveFrequency(f64),
    #[error("invalid {field}: {value} ({reason})")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("parasitic list has length {got}, expected {expected}")]
    ParasiticLength { got: usize, expected: usize },
    #[error("singular admittance matrix at omega = {omega} rad/s")]
    SingularMatrix { omega: f64 },
    #[error("frequency grid is not strictly increasing at index {0}")]
    GridNotIncreasing(usize),
    #[error("grid needs at least 2 points and min < max (min={min}, max={max}, count={count})")]
    BadGridSpec { min: f64, max: f64, count: usize },
    #[error("lossless resonator driven exactly at its pole omega = {omega} rad/s")]
    Divergent { omega: f64 },
}

pub type Result<T> = std::result::Result<T, CircuitError>;
