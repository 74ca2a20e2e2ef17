use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("Hilbert dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("mode {mode}: top Fock level population {population:.3e} exceeds {limit:.1e} at t = {time:.6e} s")]
    TruncationLeakage { mode: usize, time: f64, population: f64, limit: f64 },
    #[error("integrator failed at t = {time:.6e} s: {reason}")]
    Integrator { time: f64, reason: String },
    #[error("norm drift {drift:.3e} at t = {time:.6e} s")]
    NormDrift { time: f64, drift: f64 },
    #[error("density-matrix propagation failed checks after {halvings} step halvings: {reason}")]
    DensityChecks { halvings: usize, reason: String },
    #[error("invalid {field}: {value}")]
    InvalidParameter { field: &'static str, value: f64 },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, DynamicsError>;
