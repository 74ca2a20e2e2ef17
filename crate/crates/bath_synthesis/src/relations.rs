use std::f64::consts::PI;

use circuit_core::constants::resistance_quantum;
use circuit_core::{ResonatorSpec, SpectralGrid};

use crate::error::{Result, SynthesisError};

/// Transmon-side quantities entering the single-resonator coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingInputs {
    pub beta: f64,
    /// C + C_int (F)
    pub c_q: f64,
    /// C_T (F)
    pub c_t: f64,
    /// Qubit splitting (rad/s)
    pub delta: f64,
    pub c_j: f64,
    pub c_g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingEstimate {
    /// rad/s
    pub g: f64,
    pub warning: Option<String>,
}

/// g = beta C_c/(C + C_int + C_c_total) sqrt(C_T/C_i) sqrt(Delta omega_i).
/// `slack` bounds C_c relative to C_J, C_i and C_g before a warning is attached.
pub fn single_mode_coupling(t: &CouplingInputs, r: &ResonatorSpec, c_c_total: f64, slack: f64) -> CouplingEstimate {
    let smallest = t.c_j.min(t.c_g).min(r.capacitance);
    let warning = (r.coupling > slack * smallest)
        .then(|| format!("coupling capacitance {:.3e} F is not small against {:.3e} F", r.coupling, smallest));
    let g = t.beta * r.coupling / (t.c_q + c_c_total) * (t.c_t / r.capacitance).sqrt() * (t.delta * r.resonance()).sqrt();
    CouplingEstimate { g, warning }
}

/// Total g from the area under J: g^2 = 2 beta^2 Int J d omega/(pi Z_J).
pub fn coupling_from_area(beta: f64, z_j: f64, grid: &SpectralGrid) -> f64 {
    (2.0 * beta * beta * grid.integrate_j() / (PI * z_j)).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapsedMode {
    pub g: f64,
    pub alpha_slice: f64,
}

/// Collapse a cluster of modes near omega_r into one:
/// g^2 = (2/R_Q) sum (g_i/omega_r)^2 and alpha = (omega_r/d omega) g^2 / 2.
pub fn mode_collapse_relations(peak: &[(f64, f64)], omega_r: f64, d_omega: f64) -> Result<CollapsedMode> {
    if peak.is_empty() {
        return Err(SynthesisError::EmptyPeak);
    }
    if !(d_omega > 0.0) {
        return Err(SynthesisError::InvalidParameter { field: "d_omega", value: d_omega });
    }
    let g2 = 2.0 / resistance_quantum() * peak.iter().map(|(g, _)| (g / omega_r).powi(2)).sum::<f64>();
    Ok(CollapsedMode { g: g2.sqrt(), alpha_slice: 0.5 * (omega_r / d_omega) * g2 })
}

/// Flat-band impedance of N equal resonators spread over `omega_interval`:
/// R ~ (C_c/(C_int + C + N C_c))^2 N Z_LC omega1/omega_interval.
pub fn rectangular_impedance_estimate(
    n: usize,
    c_c: f64,
    c_shunt: f64,
    c_int: f64,
    z_lc: f64,
    omega1: f64,
    omega_interval: f64,
) -> f64 {
    let nf = n as f64;
    (c_c / (c_int + c_shunt + nf * c_c)).powi(2) * nf * z_lc * omega1 / omega_interval
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongCouplingReport {
    /// max over modes of (g_i/gamma_i)^2
    pub max_ratio_sq: f64,
    pub pi_alpha: f64,
    pub flagged: bool,
}

/// Flags a strong-coupling target whose modes never reach g ~ gamma.
pub fn strong_coupling_check(modes: &[(f64, f64)], alpha_target: f64) -> StrongCouplingReport {
    let max_ratio_sq = modes.iter().map(|(g, gamma)| (g / gamma).powi(2)).fold(0.0, f64::max);
    let pi_alpha = PI * alpha_target;
    StrongCouplingReport { max_ratio_sq, pi_alpha, flagged: alpha_target >= 0.5 && max_ratio_sq < 0.1 }
}
