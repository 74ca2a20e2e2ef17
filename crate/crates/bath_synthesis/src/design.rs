use std::f64::consts::PI;

use circuit_core::constants::{resistance_quantum, E_CHARGE};
use circuit_core::{linear_grid, network_impedance, CircuitSpec, ResonatorSpec, SpectralGrid};
use rayon::prelude::*;
use rotating_frame::{effective_spectral_density, EffectiveTemperature};
use transmon_map::SpinBosonParams;

use crate::error::{Result, SynthesisError};
use crate::fit::{fit_spectral_exponent, linear_fit, SpectralFit};
use crate::relations::{single_mode_coupling, CouplingInputs};

/// Transmon described by its impedance and shunt ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonDesign {
    pub z_j: f64,
    pub beta: f64,
    pub c_int: f64,
    /// Qubit splitting (rad/s)
    pub delta: f64,
}

impl TransmonDesign {
    pub fn c_j(&self) -> f64 {
        self.c_int / self.beta
    }

    pub fn c_g(&self) -> f64 {
        self.c_int / (1.0 - self.beta)
    }

    pub fn params(&self) -> Result<SpinBosonParams> {
        Ok(SpinBosonParams::from_impedance(self.z_j, self.beta, self.delta, self.c_int)?)
    }

    /// Circuit whose own E_J/E_C reproduces Z_J.
    pub fn circuit(&self, c_shunt: f64, resonators: Vec<ResonatorSpec>, parasitics: Option<Vec<f64>>) -> Result<CircuitSpec> {
        let c_env: f64 = c_shunt + resonators.iter().map(|r| r.coupling).sum::<f64>();
        let c_t = self.c_j() + circuit_core::series(self.c_g(), c_env);
        let e_c = E_CHARGE * E_CHARGE / (2.0 * c_t);
        let e_j = 2.0 * (resistance_quantum() / (PI * self.z_j)).powi(2) * e_c;
        Ok(CircuitSpec::new(self.c_j(), self.c_g(), e_j, c_shunt, resonators, parasitics)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaperEnd {
    /// C_c,i = C_max (1 - (i-1)^2/N^2)
    Residual,
    /// C_c,i = C_max (1 - (i-1)^2/(N-1)^2), last one exactly zero
    ExactZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderLayout {
    pub n: usize,
    /// Band start (rad/s)
    pub omega1: f64,
    /// Band width (rad/s)
    pub span: f64,
    pub z_lc: f64,
    pub quality: f64,
    pub c_c_max: f64,
    pub taper: TaperEnd,
}

impl LadderLayout {
    pub fn standard(omega1: f64, span: f64) -> Self {
        Self { n: 20, omega1, span, z_lc: 113.0, quality: 2200.0, c_c_max: 0.5e-15, taper: TaperEnd::Residual }
    }

    pub fn taper(&self, i: usize) -> f64 {
        let k = (i - 1) as f64;
        let nn = match self.taper {
            TaperEnd::Residual => self.n as f64,
            TaperEnd::ExactZero => (self.n - 1).max(1) as f64,
        };
        self.c_c_max * (1.0 - k * k / (nn * nn)).max(0.0)
    }

    /// Resonance of resonator i (1-based): cell centres, i = 1 at the top of the band.
    pub fn resonance(&self, i: usize) -> f64 {
        self.omega1 + self.span * ((self.n - i) as f64 + 0.5) / self.n as f64
    }

    pub fn resonators(&self) -> Result<Vec<ResonatorSpec>> {
        if self.n < 2 {
            return Err(SynthesisError::InvalidParameter { field: "n", value: self.n as f64 });
        }
        if !(self.span > 0.0) {
            return Err(SynthesisError::InvalidParameter { field: "span", value: self.span });
        }
        (1..=self.n)
            .map(|i| Ok(ResonatorSpec::from_resonance(self.resonance(i), self.z_lc, self.quality, self.taper(i))?))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffShape {
    Sharp,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisTarget {
    pub exponent: f64,
    pub alpha_eff: f64,
    pub omega_c: f64,
    pub shape: CutoffShape,
    pub omega1: f64,
    pub n: usize,
    /// Strong drive rate, if known, for the cutoff bound.
    pub rabi1: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRow {
    pub omega: f64,
    /// Lab-frame coupling (rad/s)
    pub coupling: f64,
    pub linewidth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// max |J_eff - linear fit| / max J_eff over the fit band
    pub max_ripple: f64,
    /// max J_eff beyond omega_c + 2 gamma relative to peak J_eff
    pub tail_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub circuit: CircuitSpec,
    pub c_shunt: f64,
    pub omega1: f64,
    pub omega_c: f64,
    /// J_eff versus detuning, from the nodal solve
    pub j_eff: SpectralGrid,
    /// dJ_eff/d detuning over the fit band (Ohm)
    pub slope: f64,
    pub spectral_fit: SpectralFit,
    pub alpha_eff: f64,
    pub modes: Vec<ModeRow>,
    pub diagnostics: Diagnostics,
}

/// Fit band for alpha calibration, as fractions of omega_c.
pub const FIT_BAND: (f64, f64) = (0.1, 0.8);
const GRID_POINTS: usize = 1600;

/// alpha from the J_eff slope: beta^2 slope/(pi Z_J).
pub fn alpha_from_slope(design: &TransmonDesign, slope: f64) -> f64 {
    design.beta * design.beta * slope / (PI * design.z_j)
}

fn detuning_grid(omega1: f64, lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    Ok(linear_grid(omega1 + lo, omega1 + hi, count)?)
}

/// Evaluate the tapered ladder design for a fixed shunt capacitance.
pub fn ladder_design(layout: &LadderLayout, design: &TransmonDesign, c_shunt: f64) -> Result<SynthesisResult> {
    let resonators = layout.resonators()?;
    let circuit = design.circuit(c_shunt, resonators, None)?;
    evaluate_design(circuit, design, layout.omega1, layout.span)
}

/// Solve the design over [omega1 - omega_c/2, omega1 + 2 omega_c] and collect fits and mode table.
pub fn evaluate_design(circuit: CircuitSpec, design: &TransmonDesign, omega1: f64, omega_c: f64) -> Result<SynthesisResult> {
    let grid = detuning_grid(omega1, 1e-3 * omega_c, 2.0 * omega_c, GRID_POINTS)?;
    let lab = network_impedance(&circuit, &grid)?;
    let j_eff = effective_spectral_density(&lab, omega1, EffectiveTemperature::Zero)?;
    let (lo, hi) = (FIT_BAND.0 * omega_c, FIT_BAND.1 * omega_c);
    let lin = linear_fit(&j_eff, lo, hi)?;
    let spectral_fit = fit_spectral_exponent(&j_eff, lo, hi)?;
    let peak = j_eff.j.iter().cloned().fold(0.0, f64::max);
    let max_ripple = j_eff
        .omega
        .iter()
        .zip(&j_eff.j)
        .filter(|(&d, _)| d >= lo && d <= hi)
        .map(|(&d, &j)| (j - lin.slope * d - lin.intercept).abs())
        .fold(0.0, f64::max)
        / peak;
    let gamma_max = circuit.resonators.iter().map(|r| r.linewidth()).fold(0.0, f64::max);
    let tail_ratio = j_eff
        .omega
        .iter()
        .zip(&j_eff.j)
        .filter(|(&d, _)| d > omega_c + 2.0 * gamma_max)
        .map(|(_, &j)| j)
        .fold(0.0, f64::max)
        / peak;
    let inputs = coupling_inputs(design, &circuit);
    let c_total = circuit.coupling_total();
    let modes = circuit
        .resonators
        .iter()
        .map(|r| ModeRow {
            omega: r.resonance(),
            coupling: single_mode_coupling(&inputs, r, c_total, 0.1).g,
            linewidth: r.linewidth(),
        })
        .collect();
    Ok(SynthesisResult {
        c_shunt: circuit.c_shunt,
        omega1,
        omega_c,
        slope: lin.slope,
        alpha_eff: alpha_from_slope(design, lin.slope),
        spectral_fit,
        modes,
        diagnostics: Diagnostics { max_ripple, tail_ratio },
        circuit,
        j_eff,
    })
}

pub fn coupling_inputs(design: &TransmonDesign, circuit: &CircuitSpec) -> CouplingInputs {
    CouplingInputs {
        beta: design.beta,
        c_q: circuit.c_shunt + design.c_int,
        c_t: 1.0 / (design.z_j * design.delta),
        delta: design.delta,
        c_j: design.c_j(),
        c_g: design.c_g(),
    }
}

/// Choose the shunt C so the fitted alpha_eff hits the target.
pub fn synthesize_ladder(target: &SynthesisTarget, design: &TransmonDesign, layout: &LadderLayout) -> Result<SynthesisResult> {
    if (target.exponent - 1.0).abs() > 1e-12 {
        return Err(SynthesisError::UnsupportedExponent(target.exponent));
    }
    if target.n < 2 {
        return Err(SynthesisError::InvalidParameter { field: "n", value: target.n as f64 });
    }
    if !(target.alpha_eff > 0.0) {
        return Err(SynthesisError::InvalidParameter { field: "alpha_eff", value: target.alpha_eff });
    }
    if let Some(rabi1) = target.rabi1 {
        if target.omega_c >= rabi1 {
            return Err(SynthesisError::CutoffAboveRabi { omega_c: target.omega_c, rabi1 });
        }
    }
    let layout = LadderLayout { n: target.n, omega1: target.omega1, span: target.omega_c, ..*layout };
    let resonators = layout.resonators()?;
    let alpha_at = |c_shunt: f64| -> Result<f64> {
        let circuit = design.circuit(c_shunt, resonators.clone(), None)?;
        Ok(evaluate_design(circuit, design, layout.omega1, layout.span)?.alpha_eff)
    };
    let a0 = alpha_at(0.0)?;
    if a0 < target.alpha_eff {
        return Err(SynthesisError::Unreachable { target: target.alpha_eff, max: a0 });
    }
    // alpha ~ (C + C_int)^-2: secant on log-log, safeguarded by bisection
    let f = |c_q: f64| -> Result<f64> { Ok(alpha_at(c_q - design.c_int)?.ln() - target.alpha_eff.ln()) };
    let mut lo = design.c_int.ln();
    let mut f_lo = a0.ln() - target.alpha_eff.ln();
    let mut hi = lo + 0.5 * f_lo.max(1e-3) + 0.1;
    let mut f_hi = f(hi.exp())?;
    while f_hi > 0.0 {
        lo = hi;
        f_lo = f_hi;
        hi += 1.0;
        f_hi = f(hi.exp())?;
    }
    let mut c_q = design.c_int;
    for it in 0..60 {
        let x = if f_lo - f_hi != 0.0 { lo - f_lo * (hi - lo) / (f_hi - f_lo) } else { 0.5 * (lo + hi) };
        let x = if x <= lo || x >= hi { 0.5 * (lo + hi) } else { x };
        let fx = f(x.exp())?;
        c_q = x.exp();
        if fx.abs() < 1e-6 || hi - lo < 1e-10 {
            break;
        }
        if fx > 0.0 {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        if it == 59 {
            return Err(SynthesisError::NoConvergence(60));
        }
    }
    let circuit = design.circuit((c_q - design.c_int).max(0.0), resonators, None)?;
    evaluate_design(circuit, design, layout.omega1, layout.span)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParasiticPoint {
    pub p: f64,
    pub j_eff: SpectralGrid,
    /// Relative L2 deviation from p = 0 over 0 < detuning < omega_c/2
    pub deviation: f64,
}

/// Uniform ring parasitics C_p = p C_c_max; each p re-solved on the same grid.
pub fn parasitic_robustness_scan(
    circuit: &CircuitSpec,
    omega1: f64,
    omega_c: f64,
    c_c_max: f64,
    p_values: &[f64],
) -> Result<Vec<ParasiticPoint>> {
    let grid = detuning_grid(omega1, 1e-3 * omega_c, 1.5 * omega_c, 1200)?;
    let solve = |p: f64| -> Result<SpectralGrid> {
        let c = circuit.with_uniform_parasitics(p * c_c_max);
        let lab = network_impedance(&c, &grid)?;
        Ok(effective_spectral_density(&lab, omega1, EffectiveTemperature::Zero)?)
    };
    let base = solve(0.0)?;
    let band = |d: f64| d > 0.0 && d < 0.5 * omega_c;
    let norm: f64 = base.omega.iter().zip(&base.j).filter(|(&d, _)| band(d)).map(|(_, j)| j * j).sum();
    p_values
        .par_iter()
        .map(|&p| {
            let j_eff = solve(p)?;
            let diff: f64 = j_eff
                .omega
                .iter()
                .zip(j_eff.j.iter().zip(&base.j))
                .filter(|(&d, _)| band(d))
                .map(|(_, (a, b))| (a - b).powi(2))
                .sum();
            Ok(ParasiticPoint { p, j_eff, deviation: (diff / norm).sqrt() })
        })
        .collect()
}
