use std::f64::consts::PI;

use circuit_core::constants::{HBAR, K_B};
use circuit_core::{CircuitSpec, SpectralGrid};
use transmon_map::SpinBosonParams;

use crate::drive::DriveSpec;
use crate::error::{FrameError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaEff {
    pub alpha: f64,
    /// R (1 + omega1/omega_c), Ohm
    pub eta: f64,
}

/// alpha_eff = (beta^2/4 pi)(R/Z_J)(1 + omega1/omega_c).
pub fn alpha_eff(params: &SpinBosonParams, r_max: f64, omega1: f64, omega_c: f64) -> Result<AlphaEff> {
    if !(omega_c > 0.0) {
        return Err(FrameError::InvalidParameter { field: "omega_c", value: omega_c });
    }
    let gain = 1.0 + omega1 / omega_c;
    Ok(AlphaEff {
        alpha: params.beta * params.beta / (4.0 * PI) * (r_max / params.z_j) * gain,
        eta: r_max * gain,
    })
}

/// k_B T_K ~ hbar Omega2^2/omega_c.
pub fn kondo_temperature_estimate(rabi2: f64, omega_c: f64) -> Result<f64> {
    if !(omega_c > 0.0) {
        return Err(FrameError::InvalidParameter { field: "omega_c", value: omega_c });
    }
    Ok(HBAR * rabi2 * rabi2 / (K_B * omega_c))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetOptions {
    pub alpha_bar_warn: f64,
    pub p_error_cap: f64,
    pub occupation_warn: f64,
    /// "much less than" factor for Gamma_internal vs Omega2/2
    pub separation: f64,
}

impl Default for BudgetOptions {
    fn default() -> Self {
        Self { alpha_bar_warn: 0.1, p_error_cap: 0.1, occupation_warn: 1e-2, separation: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeHeating {
    pub omega: f64,
    pub occupation: f64,
    pub linewidth: f64,
    pub heating_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaDiagnostics {
    pub rabi1_over_omega1: f64,
    pub rabi2_over_omega2: f64,
    pub drive_detuning_over_rabi1: f64,
    pub rabi2_over_rabi1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBudget {
    pub alpha_bar: f64,
    /// pi alpha_bar Omega2/2 (rad/s)
    pub gamma_bar: f64,
    pub p_error: f64,
    pub modes: Vec<ModeHeating>,
    pub rwa: RwaDiagnostics,
    pub gamma_internal: f64,
    pub verdict: Verdict,
    pub messages: Vec<String>,
}

/// P_error ~ (Omega1/Delta_an)^2.
pub fn leakage_error(rabi1: f64, anharmonicity: f64) -> f64 {
    (rabi1 / anharmonicity).powi(2)
}

/// <n_i> = (C_ci/C_int)^2 (Omega1/(omega_i - omega1))^2.
pub fn drive_occupation(c_c: f64, c_int: f64, rabi1: f64, omega_i: f64, omega1: f64) -> f64 {
    (c_c / c_int).powi(2) * (rabi1 / (omega_i - omega1)).powi(2)
}

/// Budget for a lab-frame spectral density `grid` (T = 0 in the lab).
pub fn error_budget(
    params: &SpinBosonParams,
    drive: &DriveSpec,
    spec: &CircuitSpec,
    grid: &SpectralGrid,
    gamma_internal: f64,
    opts: &BudgetOptions,
) -> Result<ErrorBudget> {
    if !(gamma_internal >= 0.0) {
        return Err(FrameError::InvalidParameter { field: "gamma_internal", value: gamma_internal });
    }
    let w = drive.omega1 + drive.rabi1;
    let j = grid.interpolate_j(w).ok_or(FrameError::MissingBand { lo: w, hi: w })?.max(0.0);
    let j_eff = 0.25 * j;
    let gamma_bar = params.q0 * params.q0 * j_eff / (2.0 * HBAR);
    let alpha_bar = if drive.rabi2 > 0.0 { 2.0 * gamma_bar / (PI * drive.rabi2) } else if j_eff > 0.0 { f64::INFINITY } else { 0.0 };
    let p_error = leakage_error(drive.rabi1, params.anharmonicity);
    let c_int = spec.c_int();
    let modes: Vec<ModeHeating> = spec
        .resonators
        .iter()
        .map(|r| {
            let omega = r.resonance();
            let occupation = drive_occupation(r.coupling, c_int, drive.rabi1, omega, drive.omega1);
            let linewidth = r.linewidth();
            ModeHeating { omega, occupation, linewidth, heating_rate: linewidth * occupation }
        })
        .collect();
    let rwa = RwaDiagnostics {
        rabi1_over_omega1: drive.rabi1 / drive.omega1,
        rabi2_over_omega2: drive.rabi2 / drive.omega2,
        drive_detuning_over_rabi1: (drive.omega1 - params.delta).abs() / drive.rabi1,
        rabi2_over_rabi1: drive.rabi2 / drive.rabi1,
    };

    let mut verdict = Verdict::Pass;
    let mut messages = Vec::new();
    let mut flag = |v: Verdict, m: String| {
        verdict = verdict.max(v);
        messages.push(m);
    };
    if gamma_internal > 0.0 && gamma_bar >= gamma_internal {
        flag(Verdict::Fail, format!("bath-induced rate {gamma_bar:.3e} >= internal rate {gamma_internal:.3e}"));
    }
    if p_error > opts.p_error_cap {
        flag(Verdict::Fail, format!("P_error {p_error:.4} above cap {}", opts.p_error_cap));
    }
    if alpha_bar > opts.alpha_bar_warn {
        flag(Verdict::Warn, format!("alpha_bar {alpha_bar:.3e} above {}", opts.alpha_bar_warn));
    }
    if gamma_internal > opts.separation * 0.5 * drive.rabi2 {
        flag(Verdict::Warn, format!("internal rate {gamma_internal:.3e} not well below Omega2/2"));
    }
    if let Some(m) = modes.iter().find(|m| m.occupation > opts.occupation_warn) {
        flag(Verdict::Warn, format!("mode at {:.6e} rad/s has drive occupation {:.3e}", m.omega, m.occupation));
    }
    Ok(ErrorBudget { alpha_bar, gamma_bar, p_error, modes, rwa, gamma_internal, verdict, messages })
}
