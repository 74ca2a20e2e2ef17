//! CODATA 2018 exact SI constants.

use std::f64::consts::PI;

/// Elementary charge (C).
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant (J s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;

/// Resistance quantum h/(2e)^2, about 6.45 kOhm.
pub fn resistance_quantum() -> f64 {
    PLANCK / (4.0 * E_CHARGE * E_CHARGE)
}
