use circuit_core::constants::{HBAR, K_B};
use circuit_core::SpectralGrid;
use transmon_map::SpinBosonParams;

use crate::drive::DriveSpec;
use crate::error::{FrameError, PairDiagnostic, Result};

/// Lab-frame bath mode: frequency and coupling rate (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub coupling: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffectiveTemperature {
    Zero,
    Finite(f64),
    Infinite,
}

impl EffectiveTemperature {
    /// 1 - exp(-hbar d/(k_B T)) for detuning d > 0.
    pub fn sideband_factor(&self, detuning: f64) -> f64 {
        match *self {
            Self::Zero => 1.0,
            Self::Infinite => 0.0,
            Self::Finite(t) => -(-HBAR * detuning / (K_B * t)).exp_m1(),
        }
    }

    pub fn kelvin(&self) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Finite(t) => t,
            Self::Infinite => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveFrame {
    /// Omega2/2
    pub delta_eff: f64,
    /// omega_i - omega1, may be negative
    pub detunings: Vec<f64>,
    /// g_i/2
    pub couplings: Vec<f64>,
    pub q0: f64,
    pub j_eff: Option<SpectralGrid>,
    pub temperature: EffectiveTemperature,
    pub alpha_eff: Option<f64>,
}

/// Raw frame change: subtract omega1 from every mode, halve couplings, Delta -> rabi2/2.
pub fn frame_transform(modes: &[Mode], omega1: f64, rabi2: f64, q0: f64) -> EffectiveFrame {
    EffectiveFrame {
        delta_eff: 0.5 * rabi2,
        detunings: modes.iter().map(|m| m.omega - omega1).collect(),
        couplings: modes.iter().map(|m| 0.5 * m.coupling).collect(),
        q0,
        j_eff: None,
        temperature: EffectiveTemperature::Zero,
        alpha_eff: None,
    }
}

pub fn effective_params(params: &SpinBosonParams, modes: &[Mode], drive: &DriveSpec) -> EffectiveFrame {
    frame_transform(modes, drive.omega1, drive.rabi2, params.q0)
}

/// J_eff on the grid samples lying strictly above omega1; the returned axis is the detuning.
pub fn effective_spectral_density(grid: &SpectralGrid, omega1: f64, t_eff: EffectiveTemperature) -> Result<SpectralGrid> {
    let (det, j): (Vec<f64>, Vec<f64>) = grid
        .omega
        .iter()
        .zip(&grid.j)
        .filter(|(&w, _)| w > omega1)
        .map(|(&w, &j)| {
            let d = w - omega1;
            (d, 0.25 * j * t_eff.sideband_factor(d))
        })
        .unzip();
    if det.len() < 2 {
        return Err(FrameError::MissingBand { lo: omega1, hi: grid.omega.last().copied().unwrap_or(omega1) });
    }
    Ok(SpectralGrid::from_spectral_density(det, j)?)
}

/// J_eff at arbitrary positive detunings by linear interpolation of the lab grid.
pub fn effective_spectral_density_at(
    grid: &SpectralGrid,
    omega1: f64,
    t_eff: EffectiveTemperature,
    detunings: &[f64],
) -> Result<SpectralGrid> {
    if let Some(&d) = detunings.iter().find(|&&d| !(d > 0.0)) {
        return Err(FrameError::InvalidParameter { field: "detuning", value: d });
    }
    let mut j = Vec::with_capacity(detunings.len());
    for &d in detunings {
        let v = grid.interpolate_j(omega1 + d).ok_or_else(|| missing(grid, omega1, detunings))?;
        j.push(0.25 * v * t_eff.sideband_factor(d));
    }
    Ok(SpectralGrid::from_spectral_density(detunings.to_vec(), j)?)
}

fn missing(grid: &SpectralGrid, omega1: f64, detunings: &[f64]) -> FrameError {
    let want_lo = omega1 + detunings.iter().cloned().fold(f64::INFINITY, f64::min);
    let want_hi = omega1 + detunings.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (g_lo, g_hi) = (grid.omega.first().copied().unwrap_or(f64::NAN), grid.omega.last().copied().unwrap_or(f64::NAN));
    if want_lo < g_lo {
        FrameError::MissingBand { lo: want_lo, hi: g_lo.min(want_hi) }
    } else {
        FrameError::MissingBand { lo: g_hi.max(want_lo), hi: want_hi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureFitOptions {
    /// Samples with J below this fraction of max J are ignored.
    pub floor: f64,
    /// Maximum RMS deviation of the log-ratio from the fitted line.
    pub residual_tolerance: f64,
}

impl Default for TemperatureFitOptions {
    fn default() -> Self {
        Self { floor: 1e-6, residual_tolerance: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureFit {
    pub temperature: EffectiveTemperature,
    pub residual: f64,
    pub pairs: Vec<PairDiagnostic>,
}

/// Detailed balance: J(omega1 - d)/J(omega1 + d) = exp(-hbar d/(k_B T)).
/// Fits 1/T by least squares through the origin on the log-ratio.
pub fn fit_effective_temperature(grid: &SpectralGrid, omega1: f64, opts: &TemperatureFitOptions) -> Result<TemperatureFit> {
    let jmax = grid.j.iter().cloned().fold(0.0, f64::max);
    if !(jmax > 0.0) {
        return Err(FrameError::NoSidebandPairs);
    }
    let floor = opts.floor * jmax;
    let mut upper_seen = 0usize;
    let mut lower_alive = false;
    let mut pairs = Vec::new();
    for (&w, &j_hi) in grid.omega.iter().zip(&grid.j) {
        let d = w - omega1;
        if d <= 0.0 || j_hi < floor {
            continue;
        }
        let Some(j_lo) = grid.interpolate_j(omega1 - d) else { continue };
        upper_seen += 1;
        if j_lo < floor {
            continue;
        }
        lower_alive = true;
        let log_ratio = (j_lo / j_hi).ln();
        let implied_temperature = if log_ratio >= 0.0 { f64::INFINITY } else { -HBAR * d / (K_B * log_ratio) };
        pairs.push(PairDiagnostic { detuning: d, log_ratio, implied_temperature });
    }
    if upper_seen == 0 {
        return Err(FrameError::NoSidebandPairs);
    }
    if !lower_alive {
        return Ok(TemperatureFit { temperature: EffectiveTemperature::Zero, residual: 0.0, pairs });
    }
    // ln r = -a theta, a = hbar d / k_B, theta = 1/T
    let a = |p: &PairDiagnostic| HBAR * p.detuning / K_B;
    let saa: f64 = pairs.iter().map(|p| a(p) * a(p)).sum();
    let sar: f64 = pairs.iter().map(|p| a(p) * p.log_ratio).sum();
    let theta = -sar / saa;
    let residual = (pairs.iter().map(|p| (p.log_ratio + a(p) * theta).powi(2)).sum::<f64>() / pairs.len() as f64).sqrt();
    let scale = pairs.iter().map(a).fold(0.0, f64::max);
    // negative theta: lower sideband stronger than upper
    if residual > opts.residual_tolerance || theta * scale < -1e-12 {
        return Err(FrameError::NoConsistentTemperature {
            residual,
            tolerance: opts.residual_tolerance,
            diagnostics: pairs,
        });
    }
    let temperature = if theta * scale < 1e-12 { EffectiveTemperature::Infinite } else { EffectiveTemperature::Finite(1.0 / theta) };
    Ok(TemperatureFit { temperature, residual, pairs })
}
