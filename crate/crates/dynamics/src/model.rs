use circuit_core::constants::{HBAR, K_B};
use num_complex::Complex64;
use rotating_frame::EffectiveFrame;
use sha2::{Digest, Sha256};

use crate::basis::Basis;
use crate::error::{DynamicsError, Result};

/// One bosonic mode. `coupling` enters as (coupling/2) X (b + b^dag).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub omega: f64,
    pub coupling: f64,
    pub gamma: f64,
    pub n_max: usize,
}

impl ModeSpec {
    pub fn new(omega: f64, coupling: f64, gamma: f64, n_max: usize) -> Result<Self> {
        let m = Self { omega, coupling, gamma, n_max };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if !self.omega.is_finite() {
            return Err(DynamicsError::InvalidParameter { field: "omega", value: self.omega });
        }
        if !self.coupling.is_finite() {
            return Err(DynamicsError::InvalidParameter { field: "coupling", value: self.coupling });
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(DynamicsError::InvalidParameter { field: "gamma", value: self.gamma });
        }
        if self.n_max < 2 {
            return Err(DynamicsError::InvalidParameter { field: "n_max", value: self.n_max as f64 });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModeSet {
    pub modes: Vec<ModeSpec>,
}

impl ModeSet {
    pub fn new(modes: Vec<ModeSpec>) -> Result<Self> {
        for m in &modes {
            m.validate()?;
        }
        Ok(Self { modes })
    }

    pub fn empty() -> Self {
        Self { modes: Vec::new() }
    }

    /// Modes of a rotating-frame bath, all with the same damping and truncation.
    pub fn from_frame(frame: &EffectiveFrame, gamma: f64, n_max: usize) -> Result<Self> {
        Self::new(
            frame.detunings.iter().zip(&frame.couplings).map(|(&w, &g)| ModeSpec { omega: w, coupling: g, gamma, n_max }).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn n_max(&self) -> Vec<usize> {
        self.modes.iter().map(|m| m.n_max).collect()
    }

    pub fn dissipative(&self) -> bool {
        self.modes.iter().any(|m| m.gamma > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitInit {
    PlusX,
    MinusX,
    Ground,
    Excited,
}

impl QubitInit {
    /// Amplitudes on (ground, excited).
    pub fn amplitudes(self) -> [Complex64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |a: f64, b: f64| [Complex64::new(a, 0.0), Complex64::new(b, 0.0)];
        match self {
            QubitInit::PlusX => c(h, h),
            QubitInit::MinusX => c(h, -h),
            QubitInit::Ground => c(1.0, 0.0),
            QubitInit::Excited => c(0.0, 1.0),
        }
    }

    /// <sigma_x> of the initial qubit state.
    pub fn x_sign(self) -> f64 {
        match self {
            QubitInit::PlusX => 1.0,
            QubitInit::MinusX => -1.0,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BathInit {
    Vacuum,
    /// Evolve under H + A sigma_x for `duration` from the vacuum.
    Displaced { amplitude: f64, duration: f64 },
    /// Product of coherent states at the displaced minimum for the initial sigma_x sign.
    Equilibrated,
    /// Thermal occupation of each mode at its effective-frame frequency.
    Thermal { temperature: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition {
    pub qubit: QubitInit,
    pub bath: BathInit,
}

impl InitialCondition {
    pub fn new(qubit: QubitInit, bath: BathInit) -> Self {
        Self { qubit, bath }
    }

    pub fn vacuum(qubit: QubitInit) -> Self {
        Self { qubit, bath: BathInit::Vacuum }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Top-Fock-level population limit.
    pub eps_trunc: f64,
    pub dim_cap: usize,
    /// Largest Hilbert dimension accepted on the density-matrix path.
    pub density_dim_cap: usize,
    /// Agreement required between a density run and its halved-step rerun.
    pub density_tol: f64,
    pub max_halvings: usize,
    /// Leakage retries, each adding 2 levels to the offending mode.
    pub retries: usize,
    pub norm_tol: f64,
    pub seed: u64,
    pub thermal_samples: usize,
    /// Temperature of the damping reservoirs (0 gives pure amplitude damping).
    pub dissipator_temperature: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-11,
            eps_trunc: 1e-3,
            dim_cap: 4_000_000,
            density_dim_cap: 400,
            density_tol: 1e-7,
            max_halvings: 8,
            retries: 1,
            norm_tol: 1e-5,
            seed: 0,
            thermal_samples: 64,
            dissipator_temperature: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    StateVector,
    DensityMatrix { halvings: usize },
    Sampled { samples: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub times: Vec<f64>,
    pub sx: Vec<f64>,
    pub sz: Vec<f64>,
    /// occupations[t][i]
    pub occupations: Vec<Vec<f64>>,
    /// |norm - 1| or |tr rho - 1|
    pub norm_deviation: Vec<f64>,
    /// Largest top-level population over modes.
    pub leakage: Vec<f64>,
    pub n_max: Vec<usize>,
    pub propagation: Propagation,
    pub fingerprint: String,
}

pub(crate) fn fingerprint<T: std::fmt::Debug>(value: &T) -> String {
    hex::encode(Sha256::digest(format!("{value:?}").as_bytes()))
}

pub(crate) fn bose(omega: f64, temperature: f64) -> Result<f64> {
    if temperature == 0.0 {
        return Ok(0.0);
    }
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(DynamicsError::InvalidParameter { field: "temperature", value: temperature });
    }
    if !(omega > 0.0) {
        return Err(DynamicsError::Invalid(format!("thermal state needs a positive mode frequency, got {omega}")));
    }
    Ok(1.0 / (HBAR * omega / (K_B * temperature)).exp_m1())
}

/// Truncated, renormalised coherent state.
pub(crate) fn coherent(z: Complex64, n_max: usize) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(n_max + 1);
    let mut term = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    for n in 0..=n_max {
        if n > 0 {
            term = term * z / (n as f64).sqrt();
        }
        c.push(term);
    }
    let norm = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    c.iter().map(|v| v / norm).collect()
}

/// qubit (x) bath product state.
pub(crate) fn product_state(basis: &Basis, qubit: &[Complex64], modes: &[Vec<Complex64>]) -> Vec<Complex64> {
    let bd = basis.bath_dim;
    let bath: Vec<Complex64> = (0..bd)
        .map(|r| modes.iter().enumerate().fold(Complex64::new(1.0, 0.0), |acc, (i, c)| acc * c[basis.occupation[i][r] as usize]))
        .collect();
    let mut psi = Vec::with_capacity(qubit.len() * bd);
    for q in qubit {
        psi.extend(bath.iter().map(|b| q * b));
    }
    psi
}

pub(crate) fn vacuum(n_max: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n_max + 1];
    v[0] = Complex64::new(1.0, 0.0);
    v
}

/// Observables of a state vector over a two-level qubit.
pub(crate) struct Snapshot {
    pub sx: f64,
    pub sz: f64,
    pub occupations: Vec<f64>,
    pub top: Vec<f64>,
    pub norm: f64,
}

pub(crate) fn observe_state(basis: &Basis, psi: &[Complex64]) -> Snapshot {
    let bd = basis.bath_dim;
    let m = basis.modes();
    let mut sx = 0.0;
    let mut sz = 0.0;
    let mut norm = 0.0;
    let mut occ = vec![0.0; m];
    let mut top = vec![0.0; m];
    for r in 0..bd {
        let a = psi[r];
        let b = psi[bd + r];
        let p = a.norm_sqr() + b.norm_sqr();
        sx += 2.0 * (a.conj() * b).re;
        sz += b.norm_sqr() - a.norm_sqr();
        norm += p;
        for i in 0..m {
            let n = basis.occupation[i][r] as usize;
            occ[i] += n as f64 * p;
            if n == basis.n_max[i] {
                top[i] += p;
            }
        }
    }
    Snapshot { sx, sz, occupations: occ, top, norm }
}
