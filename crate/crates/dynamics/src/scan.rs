use rayon::prelude::*;

use crate::effective::evolve_effective;
use crate::error::{DynamicsError, Result};
use crate::model::{BathInit, InitialCondition, ModeSet, ModeSpec, QubitInit, SimOptions, SimResult};

/// Smallest k with P(N <= k) >= q for N ~ Poisson(mu).
pub fn poisson_quantile(mu: f64, q: f64) -> usize {
    let mut term = (-mu).exp();
    let mut cdf = term;
    let mut k = 0;
    while cdf < q && k < 10_000 {
        k += 1;
        term *= mu / k as f64;
        cdf += term;
    }
    k
}

/// Ohmic bath of strength alpha cut at w_c: modes w_i = i w_c / N, couplings sqrt(2 alpha w_i dw).
/// Truncation covers the displaced ground state to probability 1 - eps, plus one level.
pub fn ohmic_modes(alpha: f64, omega_c: f64, n: usize, eps: f64) -> Result<ModeSet> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(DynamicsError::InvalidParameter { field: "alpha", value: alpha });
    }
    if !(omega_c > 0.0) || n == 0 {
        return Err(DynamicsError::InvalidParameter { field: "omega_c", value: omega_c });
    }
    let dw = omega_c / n as f64;
    ModeSet::new(
        (1..=n)
            .map(|i| {
                let w = dw * i as f64;
                let coupling = (2.0 * alpha * w * dw).sqrt();
                let mu = (0.5 * coupling / w).powi(2);
                ModeSpec { omega: w, coupling, gamma: 0.0, n_max: (poisson_quantile(mu, 1.0 - eps) + 1).max(2) }
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    DampedOscillations,
    IncoherentRelaxation,
    OverdampedToZero,
    Plateau,
    Ambiguous,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::DampedOscillations => "damped oscillations",
            Regime::IncoherentRelaxation => "incoherent relaxation",
            Regime::OverdampedToZero => "overdamped to zero",
            Regime::Plateau => "plateau",
            Regime::Ambiguous => "ambiguous",
        }
    }

    pub fn oscillatory(self) -> bool {
        self == Regime::DampedOscillations
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// |P| must reach this on each side for a sign change to count.
    pub prominence: f64,
    /// Largest change over the last quarter still called flat.
    pub flat_drift: f64,
    /// Last-quarter mean below this counts as zero.
    pub zero_level: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { prominence: 0.05, flat_drift: 0.05, zero_level: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub regime: Regime,
    pub sign_changes: usize,
    /// Time average of P over the window.
    pub plateau: f64,
    pub tail_mean: f64,
    pub tail_drift: f64,
}

/// Sign changes with hysteresis: P has to cross from >= +prominence to <= -prominence or back.
pub fn prominent_sign_changes(p: &[f64], prominence: f64) -> usize {
    let mut state = 0.0f64;
    let mut changes = 0;
    for &v in p {
        let s = if v >= prominence { 1.0 } else if v <= -prominence { -1.0 } else { 0.0 };
        if s != 0.0 {
            if state != 0.0 && s != state {
                changes += 1;
            }
            state = s;
        }
    }
    changes
}

fn time_mean(times: &[f64], p: &[f64]) -> f64 {
    if times.len() < 2 {
        return p.first().copied().unwrap_or(f64::NAN);
    }
    let area: f64 = times.windows(2).zip(p.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum();
    area / (times[times.len() - 1] - times[0])
}

pub fn classify(times: &[f64], p: &[f64], opts: &ClassifyOptions) -> Classification {
    let n = p.len();
    let sign_changes = prominent_sign_changes(p, opts.prominence);
    let plateau = time_mean(times, p);
    let q = (3 * n) / 4;
    let tail = &p[q.min(n.saturating_sub(1))..];
    let tail_mean = tail.iter().sum::<f64>() / tail.len().max(1) as f64;
    let tail_drift = (tail[tail.len() - 1] - tail[0]).abs();
    let regime = match sign_changes {
        0 if tail_mean.abs() < opts.zero_level => Regime::OverdampedToZero,
        0 if tail_drift < opts.flat_drift => Regime::Plateau,
        0 => Regime::IncoherentRelaxation,
        1 => Regime::Ambiguous,
        _ => Regime::DampedOscillations,
    };
    Classification { regime, sign_changes, plateau, tail_mean, tail_drift }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub n_modes: usize,
    pub omega_c: f64,
    pub t_final: f64,
    pub n_times: usize,
    /// Poisson tail probability used to pick each mode's truncation.
    pub truncation_eps: f64,
    pub samples: usize,
    pub classify: ClassifyOptions,
    pub options: SimOptions,
}

impl ScanConfig {
    pub fn times(&self) -> Vec<f64> {
        let n = self.n_times.max(2);
        (0..n).map(|k| self.t_final * k as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub alpha: f64,
    pub delta_eff: f64,
    pub temperature: f64,
    pub dim: usize,
    pub classification: Classification,
    pub result: SimResult,
}

/// One effective-frame run per (alpha, Delta_eff, T_eff) cell, qubit starting in the +x state.
/// At T_eff = 0 the bath starts at its displaced minimum; at finite T_eff it is thermal.
pub fn regime_scan(config: &ScanConfig, alphas: &[f64], deltas: &[f64], temperatures: &[f64]) -> Result<Vec<ScanRow>> {
    let cells: Vec<(f64, f64, f64)> = alphas
        .iter()
        .flat_map(|&a| deltas.iter().flat_map(move |&d| temperatures.iter().map(move |&t| (a, d, t))))
        .collect();
    let times = config.times();
    cells
        .par_iter()
        .map(|&(alpha, delta_eff, temperature)| {
            let modes = ohmic_modes(alpha, config.omega_c, config.n_modes, config.truncation_eps)?;
            let bath = if temperature > 0.0 { BathInit::Thermal { temperature } } else { BathInit::Equilibrated };
            let mut opts = config.options;
            opts.thermal_samples = config.samples;
            let result = evolve_effective(&modes, delta_eff, &InitialCondition::new(QubitInit::PlusX, bath), &times, &opts)?;
            let dim = 2 * result.n_max.iter().map(|n| n + 1).product::<usize>();
            let classification = classify(&times, &result.sx, &config.classify);
            Ok(ScanRow { alpha, delta_eff, temperature, dim, classification, result })
        })
        .collect()
}
