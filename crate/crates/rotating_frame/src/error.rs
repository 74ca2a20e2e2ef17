use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("resonance condition omega1 - omega2 = Omega1 violated: mismatch {mismatch:.6e} rad/s (tolerance {tolerance:.3e})")]
    ResonanceMismatch { mismatch: f64, tolerance: f64 },
    #[error("degenerate drive: omega1 == omega2")]
    DegenerateDrive,
    #[error("invalid drive: {0}")]
    InvalidDrive(String),
    #[error("invalid {field}: {value}")]
    InvalidParameter { field: &'static str, value: f64 },
    #[error("spectral grid does not cover [{lo:.6e}, {hi:.6e}] rad/s")]
    MissingBand { lo: f64, hi: f64 },
    #[error("no consistent effective temperature: log-ratio residual {residual:.3e} exceeds {tolerance:.3e}")]
    NoConsistentTemperature { residual: f64, tolerance: f64, diagnostics: Vec<PairDiagnostic> },
    #[error("grid has no usable sideband pairs around omega1")]
    NoSidebandPairs,
    #[error(transparent)]
    Circuit(#[from] circuit_core::CircuitError),
}

/// Per-detuning view of the detailed-balance fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDiagnostic {
    pub detuning: f64,
    /// ln(J(omega1 - d)/J(omega1 + d))
    pub log_ratio: f64,
    /// Temperature implied by this pair alone (K); infinite for ratio >= 1.
    pub implied_temperature: f64,
}

pub type Result<T> = std::result::Result<T, FrameError>;
