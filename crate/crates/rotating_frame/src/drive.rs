use crate::error::{FrameError, Result};

/// Two-tone drive. All rates angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    pub omega1: f64,
    pub rabi1: f64,
    pub omega2: f64,
    pub rabi2: f64,
}

impl DriveSpec {
    /// Default relative tolerance on the resonance condition, in units of Omega1.
    pub const TOLERANCE: f64 = 1e-6;

    pub fn new(omega1: f64, rabi1: f64, omega2: f64, rabi2: f64) -> Result<Self> {
        Self::with_tolerance(omega1, rabi1, omega2, rabi2, Self::TOLERANCE)
    }

    /// Second tone placed exactly at omega1 - Omega1.
    pub fn resonant(omega1: f64, rabi1: f64, rabi2: f64) -> Result<Self> {
        Self::new(omega1, rabi1, omega1 - rabi1, rabi2)
    }

    pub fn with_tolerance(omega1: f64, rabi1: f64, omega2: f64, rabi2: f64, rel_tol: f64) -> Result<Self> {
        if omega1 == omega2 {
            return Err(FrameError::DegenerateDrive);
        }
        if !(omega1 > 0.0 && omega2 > 0.0) || !omega1.is_finite() || !omega2.is_finite() {
            return Err(FrameError::InvalidDrive(format!("tone frequencies must be positive ({omega1}, {omega2})")));
        }
        if !(rabi1 > 0.0 && rabi1.is_finite()) {
            return Err(FrameError::InvalidDrive(format!("Omega1 must be positive, got {rabi1}")));
        }
        if !(rabi2 >= 0.0 && rabi2 < rabi1) {
            return Err(FrameError::InvalidDrive(format!("need 0 <= Omega2 < Omega1, got Omega2 = {rabi2}")));
        }
        if rabi1 >= omega1 {
            return Err(FrameError::InvalidDrive(format!("need Omega1 << omega1, got {rabi1} vs {omega1}")));
        }
        let mismatch = omega1 - omega2 - rabi1;
        let tolerance = rel_tol * rabi1;
        if mismatch.abs() > tolerance {
            return Err(FrameError::ResonanceMismatch { mismatch, tolerance });
        }
        Ok(Self { omega1, rabi1, omega2, rabi2 })
    }
}
