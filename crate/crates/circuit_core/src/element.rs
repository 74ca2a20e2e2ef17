use num_complex::Complex64;

use crate::error::{CircuitError, Result};

/// Series combination of two capacitances. An infinite capacitor acts as a wire.
pub fn series(a: f64, b: f64) -> f64 {
    if a.is_infinite() {
        return b;
    }
    if b.is_infinite() {
        return a;
    }
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    a * b / (a + b)
}

pub(crate) fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(CircuitError::NonPositiveFrequency(omega))
    }
}

/// One bath branch: parallel L, C, R to ground, tied to the shared node through `coupling`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorSpec {
    /// L_i (H)
    pub inductance: f64,
    /// C_i (F)
    pub capacitance: f64,
    /// Parallel loss R_i (Ohm); `f64::INFINITY` for lossless.
    pub resistance: f64,
    /// C_ci (F)
    pub coupling: f64,
}

impl ResonatorSpec {
    pub fn new(inductance: f64, capacitance: f64, resistance: f64, coupling: f64) -> Result<Self> {
        let bad = |field, value, reason| Err(CircuitError::InvalidParameter { field, value, reason });
        if !(inductance > 0.0 && inductance.is_finite()) {
            return bad("inductance", inductance, "must be positive and finite");
        }
        if !(capacitance > 0.0 && capacitance.is_finite()) {
            return bad("capacitance", capacitance, "must be positive and finite");
        }
        if !(resistance > 0.0) || resistance.is_nan() {
            return bad("resistance", resistance, "must be positive (infinity allowed)");
        }
        if !(coupling >= 0.0 && coupling.is_finite()) {
            return bad("coupling", coupling, "must be non-negative and finite");
        }
        Ok(Self { inductance, capacitance, resistance, coupling })
    }

    /// Build from resonance frequency (including C_c loading), impedance sqrt(L/C) and Q = R/Z_LC.
    pub fn from_resonance(omega: f64, z_lc: f64, quality: f64, coupling: f64) -> Result<Self> {
        check_omega(omega)?;
        let c = 1.0 / (z_lc * omega);
        let l = 1.0 / (omega * omega * (c + coupling));
        Self::new(l, c, quality * z_lc, coupling)
    }

    pub fn z_lc(&self) -> f64 {
        (self.inductance / self.capacitance).sqrt()
    }

    /// Loaded resonance 1/sqrt(L (C + C_c)).
    pub fn resonance(&self) -> f64 {
        1.0 / (self.inductance * (self.capacitance + self.coupling)).sqrt()
    }

    /// Energy decay rate 1/(R (C + C_c)).
    pub fn linewidth(&self) -> f64 {
        1.0 / (self.resistance * (self.capacitance + self.coupling))
    }

    pub fn lossless(&self) -> bool {
        self.resistance.is_infinite()
    }

    pub(crate) fn admittance(&self, omega: f64) -> Complex64 {
        let g = if self.lossless() { 0.0 } else { 1.0 / self.resistance };
        Complex64::new(g, omega * self.capacitance - 1.0 / (omega * self.inductance))
    }
}

/// Z_LCR(omega) = 1/(i omega C + 1/(i omega L) + 1/R).
pub fn lcr_branch_impedance(r: &ResonatorSpec, omega: f64) -> Result<Complex64> {
    check_omega(omega)?;
    let y = r.admittance(omega);
    if y == Complex64::new(0.0, 0.0) {
        return Err(CircuitError::Divergent { omega });
    }
    Ok(y.inv())
}
