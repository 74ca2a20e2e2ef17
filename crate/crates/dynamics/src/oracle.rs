use rotating_frame::DriveSpec;
use transmon_map::SpinBosonParams;

use crate::error::{DynamicsError, Result};
use crate::model::ModeSet;

const TWO_OVER_PI: f64 = std::f64::consts::FRAC_2_PI;

/// Sum of Lorentzian rates g^2 gamma / (gamma^2 + 4 (w_i - Delta)^2) over the modes.
pub fn golden_rule_oracle(modes: &ModeSet, delta_eff: f64) -> f64 {
    modes
        .modes
        .iter()
        .map(|m| {
            let d = m.omega - delta_eff;
            let den = m.gamma * m.gamma + 4.0 * d * d;
            if den == 0.0 {
                if m.coupling == 0.0 { 0.0 } else { f64::INFINITY }
            } else {
                m.coupling * m.coupling * m.gamma / den
            }
        })
        .sum()
}

/// Exponential rate from a least-squares line through ln p(t) for t >= t_start and p > floor.
pub fn fit_decay_rate(times: &[f64], population: &[f64], t_start: f64, floor: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(population)
        .filter(|(&t, &p)| t >= t_start && p > floor)
        .map(|(&t, &p)| (t, p.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(DynamicsError::Invalid(format!("decay fit needs at least 3 points, got {}", pts.len())));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(t, y)| (t - mt) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(t, _)| (t - mt).powi(2)).sum();
    Ok(-sxy / sxx)
}

/// Size of the dropped terms relative to the scales that suppress them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeglectedTerms {
    /// Counter-rotating terms at 2 omega1 and omega1 + omega2.
    pub o1: f64,
    /// Second-tone terms oscillating at Omega1 and 2 Omega1.
    pub o2_drive: f64,
    /// |Delta - omega1| / Omega1
    pub o2_detuning: f64,
    /// Spectral weight at the dressed transition (alpha_bar).
    pub o3: f64,
}

impl NeglectedTerms {
    pub fn max_fast(&self) -> f64 {
        self.o1.max(self.o2_drive).max(self.o2_detuning)
    }
}

/// Time-averaged proxies: an oscillating term of amplitude a at frequency w displaces the
/// state by about a/w; averaging |sin| over a period gives the 2/pi factor.
pub fn neglected_term_norm(lab_modes: &ModeSet, params: &SpinBosonParams, drive: &DriveSpec, alpha_bar: f64) -> NeglectedTerms {
    let proxy = |amp: f64, freq: f64| TWO_OVER_PI * amp.abs() / freq.abs();
    let mut o1 = proxy(0.5 * drive.rabi1, 2.0 * drive.omega1).max(proxy(0.5 * drive.rabi2, drive.omega1 + drive.omega2));
    for m in &lab_modes.modes {
        o1 = o1.max(proxy(0.5 * m.coupling, 2.0 * drive.omega1));
    }
    let o2_drive = proxy(0.5 * drive.rabi2, drive.rabi1).max(proxy(0.25 * drive.rabi2, 2.0 * drive.rabi1));
    NeglectedTerms { o1, o2_drive, o2_detuning: (params.delta - drive.omega1).abs() / drive.rabi1, o3: alpha_bar }
}
