use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::element::{check_omega, series, ResonatorSpec};
use crate::error::{CircuitError, Result};

/// Transmon plus shunt plus resonator ring.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    /// C_J (F)
    pub c_j: f64,
    /// C_g (F)
    pub c_g: f64,
    /// Josephson energy (J)
    pub e_j: f64,
    /// Shunt C to ground at the coupling node (F)
    pub c_shunt: f64,
    pub resonators: Vec<ResonatorSpec>,
    /// C_p[i] joins island i and island (i+1) mod N.
    pub parasitics: Vec<f64>,
}

impl CircuitSpec {
    pub fn new(
        c_j: f64,
        c_g: f64,
        e_j: f64,
        c_shunt: f64,
        resonators: Vec<ResonatorSpec>,
        parasitics: Option<Vec<f64>>,
    ) -> Result<Self> {
        let bad = |field, value, reason| Err(CircuitError::InvalidParameter { field, value, reason });
        if !(c_j > 0.0 && c_j.is_finite()) {
            return bad("c_j", c_j, "must be positive");
        }
        if !(c_g > 0.0 && c_g.is_finite()) {
            return bad("c_g", c_g, "must be positive");
        }
        if !(e_j > 0.0 && e_j.is_finite()) {
            return bad("e_j", e_j, "must be positive");
        }
        if !(c_shunt >= 0.0 && c_shunt.is_finite()) {
            return bad("c_shunt", c_shunt, "must be non-negative");
        }
        let n = resonators.len();
        let parasitics = parasitics.unwrap_or_else(|| vec![0.0; n]);
        if parasitics.len() != n {
            return Err(CircuitError::ParasiticLength { got: parasitics.len(), expected: n });
        }
        if let Some(&p) = parasitics.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return bad("parasitic", p, "must be non-negative");
        }
        Ok(Self { c_j, c_g, e_j, c_shunt, resonators, parasitics })
    }

    /// C_int = series(C_J, C_g).
    pub fn c_int(&self) -> f64 {
        series(self.c_j, self.c_g)
    }

    pub fn coupling_total(&self) -> f64 {
        self.resonators.iter().map(|r| r.coupling).sum()
    }

    /// Copy with every ring link set to `c_p`.
    pub fn with_uniform_parasitics(&self, c_p: f64) -> Self {
        Self { parasitics: vec![c_p; self.resonators.len()], ..self.clone() }
    }

    fn active_islands(&self) -> Vec<usize> {
        let n = self.resonators.len();
        (0..n)
            .filter(|&i| {
                let prev = self.parasitics[(i + n - 1) % n];
                self.resonators[i].coupling > 0.0 || self.parasitics[i] > 0.0 || prev > 0.0
            })
            .collect()
    }
}

/// Nodal admittance matrix over the islands, rows ordered as `CircuitSpec::resonators`.
pub fn admittance_matrix(spec: &CircuitSpec, omega: f64) -> Result<DMatrix<Complex64>> {
    check_omega(omega)?;
    let n = spec.resonators.len();
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    for (i, r) in spec.resonators.iter().enumerate() {
        a[(i, i)] += r.admittance(omega) + Complex64::new(0.0, omega * r.coupling);
    }
    stamp_ring(&mut a, &spec.parasitics, omega, &(0..n).collect::<Vec<_>>());
    Ok(a)
}

// `index` maps original island number -> row; usize::MAX for dropped islands.
fn stamp_ring(a: &mut DMatrix<Complex64>, parasitics: &[f64], omega: f64, index: &[usize]) {
    let n = parasitics.len();
    for (i, &cp) in parasitics.iter().enumerate() {
        let j = (i + 1) % n;
        if cp == 0.0 || i == j {
            continue;
        }
        let (ri, rj) = (index[i], index[j]);
        let y = Complex64::new(0.0, omega * cp);
        a[(ri, ri)] += y;
        a[(rj, rj)] += y;
        a[(ri, rj)] -= y;
        a[(rj, ri)] -= y;
    }
}

/// Admittance 1/Z looking from the coupling node into the resonator network.
pub fn bath_admittance(spec: &CircuitSpec, omega: f64) -> Result<Complex64> {
    check_omega(omega)?;
    let active = spec.active_islands();
    if active.iter().all(|&i| spec.resonators[i].coupling == 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n = spec.resonators.len();
    let m = active.len();
    let mut index = vec![usize::MAX; n];
    for (row, &i) in active.iter().enumerate() {
        index[i] = row;
    }
    // Unknowns U_i = 1 - V_i/V. Row sums of the nodal matrix minus the coupling
    // admittance leave only the LCR branch, so A U = Y_lcr.
    let mut a = DMatrix::<Complex64>::zeros(m, m);
    let mut rhs = DVector::<Complex64>::zeros(m);
    for (row, &i) in active.iter().enumerate() {
        let r = &spec.resonators[i];
        let y = r.admittance(omega);
        a[(row, row)] += y + Complex64::new(0.0, omega * r.coupling);
        rhs[row] = y;
    }
    stamp_ring(&mut a, &spec.parasitics, omega, &index);
    let u = a.lu().solve(&rhs).ok_or(CircuitError::SingularMatrix { omega })?;
    if u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CircuitError::SingularMatrix { omega });
    }
    Ok(active
        .iter()
        .enumerate()
        .map(|(row, &i)| Complex64::new(0.0, omega * spec.resonators[i].coupling) * u[row])
        .sum())
}

/// Z_eff = 1/(i omega (C + C_int) + 1/Z).
pub fn effective_impedance(spec: &CircuitSpec, omega: f64) -> Result<Complex64> {
    let y = bath_admittance(spec, omega)? + Complex64::new(0.0, omega * (spec.c_shunt + spec.c_int()));
    Ok(y.inv())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexImpedanceSample {
    pub omega: f64,
    pub z: Complex64,
}

/// Z_eff and J = omega Re Z_eff on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    pub omega: Vec<f64>,
    pub z_eff: Vec<Complex64>,
    pub j: Vec<f64>,
}

impl SpectralGrid {
    pub fn from_samples(samples: Vec<ComplexImpedanceSample>) -> Result<Self> {
        let omega: Vec<f64> = samples.iter().map(|s| s.omega).collect();
        check_increasing(&omega)?;
        let z_eff: Vec<Complex64> = samples.iter().map(|s| s.z).collect();
        let j = samples.iter().map(|s| s.omega * s.z.re).collect();
        Ok(Self { omega, z_eff, j })
    }

    /// Grid carrying only J (impedance set to J/omega, real).
    pub fn from_spectral_density(omega: Vec<f64>, j: Vec<f64>) -> Result<Self> {
        check_increasing(&omega)?;
        let z_eff = omega.iter().zip(&j).map(|(w, j)| Complex64::new(j / w, 0.0)).collect();
        Ok(Self { omega, z_eff, j })
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = ComplexImpedanceSample> + '_ {
        self.omega.iter().zip(&self.z_eff).map(|(&omega, &z)| ComplexImpedanceSample { omega, z })
    }

    /// Linear interpolation of J; `None` outside the grid.
    pub fn interpolate_j(&self, omega: f64) -> Option<f64> {
        let w = &self.omega;
        if w.is_empty() || omega < w[0] || omega > w[w.len() - 1] {
            return None;
        }
        let k = w.partition_point(|&x| x <= omega);
        if k == 0 {
            return Some(self.j[0]);
        }
        if k >= w.len() {
            return Some(self.j[w.len() - 1]);
        }
        let t = (omega - w[k - 1]) / (w[k] - w[k - 1]);
        Some(self.j[k - 1] + t * (self.j[k] - self.j[k - 1]))
    }

    /// Trapezoidal integral of J over the whole grid.
    pub fn integrate_j(&self) -> f64 {
        self.omega
            .windows(2)
            .zip(self.j.windows(2))
            .map(|(w, j)| 0.5 * (w[1] - w[0]) * (j[0] + j[1]))
            .sum()
    }
}

fn check_increasing(omega: &[f64]) -> Result<()> {
    for (k, w) in omega.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(CircuitError::GridNotIncreasing(k + 1));
        }
    }
    Ok(())
}

/// `count` evenly spaced points on [min, max].
pub fn linear_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(max > min) || !min.is_finite() || !max.is_finite() {
        return Err(CircuitError::BadGridSpec { min, max, count });
    }
    let step = (max - min) / (count - 1) as f64;
    Ok((0..count).map(|k| if k + 1 == count { max } else { min + step * k as f64 }).collect())
}

/// Solve the network on every grid point (parallel, order preserved).
pub fn network_impedance(spec: &CircuitSpec, grid: &[f64]) -> Result<SpectralGrid> {
    check_increasing(grid)?;
    let samples = grid
        .par_iter()
        .map(|&omega| effective_impedance(spec, omega).map(|z| ComplexImpedanceSample { omega, z }))
        .collect::<Result<Vec<_>>>()?;
    SpectralGrid::from_samples(samples)
}
