use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;
use rotating_frame::DriveSpec;
use transmon_map::SpinBosonParams;

use crate::basis::{Basis, Hamiltonian};
use crate::effective::{check_times, control, effective_hamiltonian, propagate_effective_states, Driven};
use crate::error::{DynamicsError, Result};
use crate::model::{fingerprint, observe_state, product_state, vacuum, ModeSet, ModeSpec, Propagation, QubitInit, SimOptions, SimResult};
use crate::ode::integrate_dp54;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Two lowest-lying dressed states of the driven three-level transmon, in the frame rotating at omega1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedBasis {
    /// Delta - omega1
    pub detuning: f64,
    /// (lower, upper)
    pub energies: [f64; 2],
    /// Columns over levels 0, 1, 2, sign-fixed so the level-0 component is positive.
    pub vectors: [[f64; 3]; 2],
    /// |<a| X_raise |b>| between the dressed states
    pub raise_element: f64,
}

impl DressedBasis {
    pub fn new(rabi1: f64, anharmonicity: f64, detuning: f64) -> Result<Self> {
        if !(rabi1 > 0.0 && rabi1.is_finite()) {
            return Err(DynamicsError::InvalidParameter { field: "rabi1", value: rabi1 });
        }
        if !(anharmonicity > 0.0 && anharmonicity.is_finite()) {
            return Err(DynamicsError::InvalidParameter { field: "anharmonicity", value: anharmonicity });
        }
        let x = 0.5 * rabi1;
        let h = Matrix3::new(0.0, x, 0.0, x, detuning, x * SQRT2, 0.0, x * SQRT2, 2.0 * detuning - anharmonicity);
        let eig = SymmetricEigen::new(h);
        let drop = (0..3)
            .max_by(|&a, &b| eig.eigenvectors[(2, a)].abs().total_cmp(&eig.eigenvectors[(2, b)].abs()))
            .expect("three eigenvectors");
        let mut keep: Vec<usize> = (0..3).filter(|&k| k != drop).collect();
        keep.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut vectors = [[0.0; 3]; 2];
        for (j, &k) in keep.iter().enumerate() {
            let sign = if eig.eigenvectors[(0, k)] < 0.0 { -1.0 } else { 1.0 };
            for (l, v) in vectors[j].iter_mut().enumerate() {
                *v = sign * eig.eigenvectors[(l, k)];
            }
        }
        let [a, b] = vectors;
        // X_raise: |1><0| + sqrt2 |2><1|
        let raise_element = (a[1] * b[0] + SQRT2 * a[2] * b[1]).abs();
        Ok(Self { detuning, energies: [eig.eigenvalues[keep[0]], eig.eigenvalues[keep[1]]], vectors, raise_element })
    }

    pub fn splitting(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }
}

/// Qubit and drive parameters of a laboratory-frame run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabSetup {
    pub delta: f64,
    pub anharmonicity: f64,
    pub omega1: f64,
    pub rabi1: f64,
    pub omega2: f64,
    /// Amplitude of the second tone as applied.
    pub rabi2: f64,
    /// Delta_eff of the matching effective-frame run.
    pub delta_eff: f64,
    pub dressed: DressedBasis,
}

impl LabSetup {
    /// Uses the qubit splitting and tones exactly as given.
    pub fn bare(params: &SpinBosonParams, drive: &DriveSpec) -> Result<Self> {
        let dressed = DressedBasis::new(drive.rabi1, params.anharmonicity, params.delta - drive.omega1)?;
        Ok(Self {
            delta: params.delta,
            anharmonicity: params.anharmonicity,
            omega1: drive.omega1,
            rabi1: drive.rabi1,
            omega2: drive.omega2,
            rabi2: drive.rabi2,
            delta_eff: 0.5 * drive.rabi2,
            dressed,
        })
    }

    /// Places the qubit so the lower dressed state is an equal superposition of levels 0 and 1,
    /// puts the second tone on the dressed splitting and rescales its amplitude by the dressed matrix element.
    pub fn calibrated(anharmonicity: f64, drive: &DriveSpec) -> Result<Self> {
        let f = |d: f64| -> Result<f64> {
            let b = DressedBasis::new(drive.rabi1, anharmonicity, d)?;
            Ok(b.vectors[0][0].abs() - b.vectors[0][1].abs())
        };
        let (mut lo, mut hi) = (-0.5 * drive.rabi1, 0.5 * drive.rabi1);
        let (mut flo, fhi) = (f(lo)?, f(hi)?);
        if flo * fhi > 0.0 {
            return Err(DynamicsError::Invalid("dressed calibration has no bracketing detuning".into()));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid)?;
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * drive.rabi1 {
                break;
            }
        }
        let d = 0.5 * (lo + hi);
        let dressed = DressedBasis::new(drive.rabi1, anharmonicity, d)?;
        Ok(Self {
            delta: drive.omega1 + d,
            anharmonicity,
            omega1: drive.omega1,
            rabi1: drive.rabi1,
            omega2: drive.omega1 - dressed.splitting(),
            rabi2: drive.rabi2 * 0.5 / dressed.raise_element,
            delta_eff: 0.5 * drive.rabi2,
            dressed,
        })
    }

    /// Lab modes seen from the doubly rotating frame: detuned by omega1, couplings halved.
    pub fn effective_modes(&self, lab: &ModeSet) -> Result<ModeSet> {
        ModeSet::new(
            lab.modes.iter().map(|m| ModeSpec { omega: m.omega - self.omega1, coupling: 0.5 * m.coupling, ..*m }).collect(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct LabRun {
    /// Observables of the frame-rotated state.
    pub result: SimResult,
    /// Frame-rotated state (qubit-major, two levels) at each output time.
    pub states: Vec<Vec<Complex64>>,
}

fn lab_hamiltonian(modes: &ModeSet, setup: &LabSetup, cap: usize) -> Result<Hamiltonian> {
    let basis = Basis::new(&modes.n_max(), 3, cap)?;
    Ok(Hamiltonian::new(
        basis,
        vec![0.0, setup.delta, 2.0 * setup.delta - setup.anharmonicity],
        vec![1.0, SQRT2],
        modes.modes.iter().map(|m| m.omega).collect(),
        modes.modes.iter().map(|m| 0.5 * m.coupling).collect(),
        0.0,
    ))
}

/// Lab state at time t mapped into the effective frame (two-level, bath unchanged in size).
fn rotate(basis: &Basis, setup: &LabSetup, t: f64, y: &[Complex64]) -> Vec<Complex64> {
    let bd = basis.bath_dim;
    let [va, vb] = setup.dressed.vectors;
    let mean = 0.5 * (setup.dressed.energies[0] + setup.dressed.energies[1]);
    let pa = Complex64::from_polar(1.0, (setup.dressed.energies[0] - mean) * t);
    let pb = Complex64::from_polar(1.0, (setup.dressed.energies[1] - mean) * t);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * bd];
    for r in 0..bd {
        let n = basis.total_photons(r) as f64;
        let p: Vec<Complex64> = (0..3).map(|k| y[k * bd + r] * Complex64::from_polar(1.0, setup.omega1 * t * (k as f64 + n))).collect();
        let ca = (0..3).map(|k| p[k] * va[k]).sum::<Complex64>() * pa;
        let cb = (0..3).map(|k| p[k] * vb[k]).sum::<Complex64>() * pb;
        out[r] = (cb + ca) * h;
        out[bd + r] = (cb - ca) * h;
    }
    out
}

/// Time-dependent lab-frame propagation of the three-level transmon and its modes under both tones,
/// followed by the rotation into the effective frame. Only a vacuum bath is supported.
pub fn evolve_lab_driven(modes: &ModeSet, setup: &LabSetup, qubit: QubitInit, times: &[f64], opts: &SimOptions) -> Result<LabRun> {
    check_times(times)?;
    if modes.dissipative() {
        return Err(DynamicsError::Invalid("lab-frame runs are unitary; set gamma = 0".into()));
    }
    let ham = lab_hamiltonian(modes, setup, opts.dim_cap)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let q = qubit.amplitudes();
    let (cp, cm) = ((q[0] + q[1]) * h, (q[0] - q[1]) * h);
    let [va, vb] = setup.dressed.vectors;
    let lab_q: Vec<Complex64> = (0..3).map(|k| cp * vb[k] + cm * va[k]).collect();
    let bath: Vec<Vec<Complex64>> = modes.modes.iter().map(|m| vacuum(m.n_max)).collect();
    let psi0 = product_state(&ham.basis, &lab_q, &bath);

    let s = *setup;
    let mut sys = Driven::new(&ham, move |t: f64| s.rabi1 * (s.omega1 * t).cos() + s.rabi2 * (s.omega2 * t).cos());
    let two = Basis::new(&modes.n_max(), 2, opts.dim_cap)?;
    let mut states = Vec::with_capacity(times.len());
    let mut result = SimResult {
        times: times.to_vec(),
        sx: Vec::new(),
        sz: Vec::new(),
        occupations: Vec::new(),
        norm_deviation: Vec::new(),
        leakage: Vec::new(),
        n_max: modes.n_max(),
        propagation: Propagation::StateVector,
        fingerprint: fingerprint(&(modes, setup, qubit, times, opts)),
    };
    integrate_dp54(&mut sys, times[0], psi0, times, &control(opts), |_, t, y| {
        let norm: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        let drift = (norm - 1.0).abs();
        if drift > opts.norm_tol {
            return Err(DynamicsError::NormDrift { time: t, drift });
        }
        let p2 = rotate(&ham.basis, setup, t, y);
        let snap = observe_state(&two, &p2);
        if let Some((mode, &p)) = snap.top.iter().enumerate().find(|(_, &p)| p > opts.eps_trunc) {
            return Err(DynamicsError::TruncationLeakage { mode, time: t, population: p, limit: opts.eps_trunc });
        }
        result.sx.push(snap.sx);
        result.sz.push(snap.sz);
        result.leakage.push(snap.top.iter().copied().fold(0.0, f64::max));
        result.norm_deviation.push(1.0 - snap.norm);
        result.occupations.push(snap.occupations);
        states.push(p2);
        Ok(())
    })?;
    Ok(LabRun { result, states })
}

/// Trace distance between a normalised pure state and a possibly subnormalised one.
pub fn pure_trace_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let nb: f64 = b.iter().map(|v| v.norm_sqr()).sum();
    let ov = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr();
    0.5 * ((1.0 - nb).powi(2) + 4.0 * (nb - ov).max(0.0)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameComparison {
    pub times: Vec<f64>,
    pub distance: Vec<f64>,
    pub mean_distance: f64,
    pub max_distance: f64,
    /// max(Omega1/omega1, Omega2/Omega1, alpha_bar)
    pub scale: f64,
    /// mean_distance / scale
    pub c1: f64,
    pub sx_lab: Vec<f64>,
    pub sx_effective: Vec<f64>,
}

/// Lab-frame run against the effective-frame run from the same initial qubit state and a vacuum bath.
pub fn frame_comparison(
    lab_modes: &ModeSet,
    setup: &LabSetup,
    qubit: QubitInit,
    times: &[f64],
    alpha_bar: f64,
    opts: &SimOptions,
) -> Result<FrameComparison> {
    let lab = evolve_lab_driven(lab_modes, setup, qubit, times, opts)?;
    let eff_modes = setup.effective_modes(lab_modes)?;
    let ham = effective_hamiltonian(&eff_modes, setup.delta_eff, opts.dim_cap)?;
    let bath: Vec<Vec<Complex64>> = eff_modes.modes.iter().map(|m| vacuum(m.n_max)).collect();
    let psi0 = product_state(&ham.basis, &qubit.amplitudes(), &bath);
    let mut distance = Vec::with_capacity(times.len());
    let mut sx_eff = Vec::with_capacity(times.len());
    propagate_effective_states(&ham, psi0, 0.0, times, opts, |k, _, y| {
        distance.push(pure_trace_distance(y, &lab.states[k]));
        sx_eff.push(observe_state(&ham.basis, y).sx);
        Ok(())
    })?;
    let mean_distance = distance.iter().sum::<f64>() / distance.len() as f64;
    let max_distance = distance.iter().copied().fold(0.0, f64::max);
    let scale = (setup.rabi1 / setup.omega1).max(2.0 * setup.delta_eff / setup.rabi1).max(alpha_bar);
    Ok(FrameComparison {
        times: times.to_vec(),
        distance,
        mean_distance,
        max_distance,
        scale,
        c1: mean_distance / scale,
        sx_lab: lab.result.sx,
        sx_effective: sx_eff,
    })
}
