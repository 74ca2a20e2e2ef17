use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error("target alpha_eff {target} unreachable: maximum attainable with C >= 0 is {max}")]
    Unreachable { target: f64, max: f64 },
    #[error("invalid {field}: {value}")]
    InvalidParameter { field: &'static str, value: f64 },
    #[error("bath cutoff {omega_c:.4e} rad/s must lie below the strong Rabi rate {rabi1:.4e} rad/s")]
    CutoffAboveRabi { omega_c: f64, rabi1: f64 },
    #[error("only exponent s = 1 targets can be synthesized (got {0})")]
    UnsupportedExponent(f64),
    #[error("fit band [{lo:.4e}, {hi:.4e}] holds {count} usable samples")]
    FitBand { lo: f64, hi: f64, count: usize },
    #[error("empty peak")]
    EmptyPeak,
    #[error("shunt calibration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error(transparent)]
    Circuit(#[from] circuit_core::CircuitError),
    #[error(transparent)]
    Transmon(#[from] transmon_map::TransmonError),
    #[error(transparent)]
    Frame(#[from] rotating_frame::FrameError),
}

pub type Result<T> = std::result::Result<T, SynthesisError>;
