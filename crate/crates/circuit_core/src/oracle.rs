use num_complex::Complex64;

use crate::element::check_omega;
use crate::error::{CircuitError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSample {
    /// Outgoing-wave amplitude ratio A(omega).
    pub a: Complex64,
    /// (R/4)|A|^2
    pub re_z: f64,
}

/// Semi-infinite line of impedance `r` loading an LC whose total capacitance is `c_total`.
pub fn single_resonator_oracle(l: f64, c_total: f64, r: f64, omega: f64) -> Result<OracleSample> {
    check_omega(omega)?;
    let omega1 = 1.0 / (l * c_total).sqrt();
    let x = l * omega / r;
    let den = Complex64::new(1.0 - (omega / omega1).powi(2), -x);
    if den.norm() == 0.0 || !x.is_finite() {
        return Err(CircuitError::Divergent { omega });
    }
    let a = Complex64::new(0.0, -2.0 * x) / den;
    Ok(OracleSample { a, re_z: 0.25 * r * a.norm_sqr() })
}

/// Direct parallel LCR impedance 1/(1/R + 1/(i omega L) + i omega C).
pub fn parallel_lcr(l: f64, c_total: f64, r: f64, omega: f64) -> Result<Complex64> {
    check_omega(omega)?;
    let g = if r.is_infinite() { 0.0 } else { 1.0 / r };
    let y = Complex64::new(g, omega * c_total - 1.0 / (omega * l));
    if y.norm() == 0.0 {
        return Err(CircuitError::Divergent { omega });
    }
    Ok(y.inv())
}
