use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::basis::{Basis, Hamiltonian};
use crate::error::{DynamicsError, Result};
use crate::model::{
    bose, coherent, fingerprint, observe_state, product_state, vacuum, BathInit, InitialCondition, ModeSet, Propagation,
    SimOptions, SimResult, Snapshot,
};
use crate::ode::{integrate_dp54, OdeSystem, StepControl};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// H_eff = (Delta/2) sigma_z + sum w_i n_i + sigma_x sum (g_i/2)(b_i + b_i^dag).
pub fn effective_hamiltonian(modes: &ModeSet, delta_eff: f64, dim_cap: usize) -> Result<Hamiltonian> {
    if !delta_eff.is_finite() {
        return Err(DynamicsError::InvalidParameter { field: "delta_eff", value: delta_eff });
    }
    let basis = Basis::new(&modes.n_max(), 2, dim_cap)?;
    Ok(Hamiltonian::new(
        basis,
        vec![-0.5 * delta_eff, 0.5 * delta_eff],
        vec![1.0],
        modes.modes.iter().map(|m| m.omega).collect(),
        modes.modes.iter().map(|m| 0.5 * m.coupling).collect(),
        0.0,
    ))
}

pub(crate) struct Driven<'a, F: Fn(f64) -> f64> {
    pub ham: &'a Hamiltonian,
    pub drive: F,
    scratch: Vec<Complex64>,
}

impl<'a, F: Fn(f64) -> f64> Driven<'a, F> {
    pub fn new(ham: &'a Hamiltonian, drive: F) -> Self {
        Self { ham, drive, scratch: Vec::new() }
    }
}

impl<F: Fn(f64) -> f64> OdeSystem for Driven<'_, F> {
    fn deriv(&mut self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let s = (self.drive)(t);
        self.ham.apply_derivative(s, y, dy, &mut self.scratch);
    }
}

pub(crate) fn control(opts: &SimOptions) -> StepControl {
    StepControl { rtol: opts.rtol, atol: opts.atol, ..StepControl::default() }
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(DynamicsError::Invalid("empty time grid".into()));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(DynamicsError::Invalid("time grid must be finite and nondecreasing".into()));
    }
    Ok(())
}

fn check_snapshot(s: &Snapshot, t: f64, opts: &SimOptions) -> Result<()> {
    let drift = (s.norm - 1.0).abs();
    if drift > opts.norm_tol {
        return Err(DynamicsError::NormDrift { time: t, drift });
    }
    if let Some((mode, &p)) = s.top.iter().enumerate().find(|(_, &p)| p > opts.eps_trunc) {
        return Err(DynamicsError::TruncationLeakage { mode, time: t, population: p, limit: opts.eps_trunc });
    }
    Ok(())
}

#[derive(Default)]
struct Trace {
    sx: Vec<f64>,
    sz: Vec<f64>,
    occ: Vec<Vec<f64>>,
    norm: Vec<f64>,
    leak: Vec<f64>,
}

impl Trace {
    fn push(&mut self, s: Snapshot) {
        self.sx.push(s.sx);
        self.sz.push(s.sz);
        self.leak.push(s.top.iter().copied().fold(0.0, f64::max));
        self.norm.push((s.norm - 1.0).abs());
        self.occ.push(s.occupations);
    }
}

/// State-vector propagation of the effective Hamiltonian with an optional constant sigma_x term.
pub fn propagate_effective_states(
    ham: &Hamiltonian,
    psi0: Vec<Complex64>,
    static_x: f64,
    times: &[f64],
    opts: &SimOptions,
    mut visit: impl FnMut(usize, f64, &[Complex64]) -> Result<()>,
) -> Result<Vec<Complex64>> {
    check_times(times)?;
    let mut sys = Driven::new(ham, move |_| static_x);
    let (y, _) = integrate_dp54(&mut sys, times[0], psi0, times, &control(opts), |k, t, y| visit(k, t, y))?;
    Ok(y)
}

fn initial_pure(ham: &Hamiltonian, modes: &ModeSet, init: &InitialCondition, opts: &SimOptions, sample: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
    let basis = &ham.basis;
    let q = init.qubit.amplitudes();
    let states: Vec<Vec<Complex64>> = match init.bath {
        BathInit::Vacuum | BathInit::Displaced { .. } => modes.modes.iter().map(|m| vacuum(m.n_max)).collect(),
        BathInit::Thermal { .. } => {
            let z = sample.unwrap_or(&[]);
            modes.modes.iter().enumerate().map(|(i, m)| coherent(z.get(i).copied().unwrap_or(ZERO), m.n_max)).collect()
        }
        BathInit::Equilibrated => {
            let s = init.qubit.x_sign();
            modes
                .modes
                .iter()
                .map(|m| {
                    if m.omega == 0.0 {
                        return Err(DynamicsError::Invalid("equilibrated bath needs nonzero mode frequencies".into()));
                    }
                    Ok(coherent(Complex64::new(-s * 0.5 * m.coupling / m.omega, 0.0), m.n_max))
                })
                .collect::<Result<_>>()?
        }
    };
    let psi = product_state(basis, &q, &states);
    match init.bath {
        BathInit::Displaced { amplitude, duration } => {
            if !(duration >= 0.0 && duration.is_finite()) {
                return Err(DynamicsError::InvalidParameter { field: "duration", value: duration });
            }
            let times = [0.0, duration];
            propagate_effective_states(ham, psi, amplitude, &times, opts, |_, t, y| {
                let s = observe_state(basis, y);
                check_snapshot(&s, t, opts)
            })
        }
        _ => Ok(psi),
    }
}

fn run_state_vector(ham: &Hamiltonian, psi0: Vec<Complex64>, times: &[f64], opts: &SimOptions) -> Result<Trace> {
    let mut trace = Trace::default();
    propagate_effective_states(ham, psi0, 0.0, times, opts, |_, t, y| {
        let s = observe_state(&ham.basis, y);
        check_snapshot(&s, t, opts)?;
        trace.push(s);
        Ok(())
    })?;
    Ok(trace)
}

fn run_sampled(ham: &Hamiltonian, modes: &ModeSet, init: &InitialCondition, times: &[f64], opts: &SimOptions, temperature: f64) -> Result<Trace> {
    let nbar: Vec<f64> = modes.modes.iter().map(|m| bose(m.omega, temperature)).collect::<Result<_>>()?;
    let samples = opts.thermal_samples.max(1);
    let runs: Vec<Result<Trace>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k as u64);
            let z: Vec<Complex64> = nbar
                .iter()
                .map(|&n| {
                    if n == 0.0 {
                        return ZERO;
                    }
                    let d = Normal::new(0.0, (0.5 * n).sqrt()).expect("finite sigma");
                    Complex64::new(d.sample(&mut rng), d.sample(&mut rng))
                })
                .collect();
            let psi0 = initial_pure(ham, modes, init, opts, Some(&z))?;
            run_state_vector(ham, psi0, times, opts)
        })
        .collect();
    let mut acc: Option<Trace> = None;
    for run in runs {
        let run = run?;
        match acc.as_mut() {
            None => acc = Some(run),
            Some(a) => {
                let add = |x: &mut Vec<f64>, y: &[f64]| x.iter_mut().zip(y).for_each(|(p, q)| *p += q);
                add(&mut a.sx, &run.sx);
                add(&mut a.sz, &run.sz);
                add(&mut a.norm, &run.norm);
                a.leak.iter_mut().zip(&run.leak).for_each(|(p, q)| *p = p.max(*q));
                a.occ.iter_mut().zip(&run.occ).for_each(|(p, q)| add(p, q));
            }
        }
    }
    let mut a = acc.expect("at least one sample");
    let inv = 1.0 / samples as f64;
    a.sx.iter_mut().chain(a.sz.iter_mut()).chain(a.norm.iter_mut()).for_each(|v| *v *= inv);
    a.occ.iter_mut().flatten().for_each(|v| *v *= inv);
    Ok(a)
}

/// Lindblad generator drho = -i(K rho - rho K^dag) + sum c rho c^dag, with K and c held as sparse rows.
struct Lindblad {
    k: Vec<Vec<(usize, Complex64)>>,
    jumps: Vec<Vec<Vec<(usize, Complex64)>>>,
    scale: f64,
}

fn sparse_rows(m: &DMatrix<Complex64>) -> Vec<Vec<(usize, Complex64)>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).filter(|&j| m[(i, j)] != Complex64::new(0.0, 0.0)).map(|j| (j, m[(i, j)])).collect()).collect()
}

fn row_norm(m: &DMatrix<Complex64>) -> f64 {
    (0..m.nrows()).map(|i| m.row(i).iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

impl Lindblad {
    fn new(ham: &Hamiltonian, modes: &ModeSet, temperature: f64) -> Result<Self> {
        let h = ham.dense(0.0);
        let d = h.nrows();
        let bd = ham.basis.bath_dim;
        let mut k = h.clone();
        let mut jumps = Vec::new();
        let mut scale = 0.0;
        for (i, m) in modes.modes.iter().enumerate() {
            if m.gamma == 0.0 {
                continue;
            }
            let mut a = DMatrix::<Complex64>::zeros(d, d);
            let st = ham.basis.strides[i];
            for q in 0..ham.levels() {
                for r in 0..bd {
                    let n = ham.basis.occupation[i][r] as usize;
                    if n > 0 {
                        a[(q * bd + r - st, q * bd + r)] = Complex64::new((n as f64).sqrt(), 0.0);
                    }
                }
            }
            let nbar = if temperature > 0.0 { bose(m.omega, temperature)? } else { 0.0 };
            let ad = a.adjoint();
            let mut ops = vec![(a * Complex64::new((m.gamma * (nbar + 1.0)).sqrt(), 0.0))];
            if nbar > 0.0 {
                ops.push(ad * Complex64::new((m.gamma * nbar).sqrt(), 0.0));
            }
            for c in ops {
                k -= (c.adjoint() * &c) * Complex64::new(0.0, 0.5);
                scale += row_norm(&c).powi(2);
                jumps.push(sparse_rows(&c));
            }
        }
        scale += 2.0 * row_norm(&k);
        Ok(Self { k: sparse_rows(&k), jumps, scale })
    }

    /// Assumes rho Hermitian, so rho K^dag = (K rho)^dag.
    fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let d = rho.nrows();
        let mi = Complex64::new(0.0, -1.0);
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for j in 0..d {
            let col = rho.column(j);
            for (i, row) in self.k.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(c, v) in row {
                    acc += v * col[c];
                }
                m[(i, j)] = mi * acc;
            }
        }
        let mut out = &m + m.adjoint();
        for c in &self.jumps {
            for (j, rj) in c.iter().enumerate() {
                for &(l, b) in rj {
                    let bc = b.conj();
                    for (i, ri) in c.iter().enumerate() {
                        for &(kk, a) in ri {
                            out[(i, j)] += a * bc * rho[(kk, l)];
                        }
                    }
                }
            }
        }
        out
    }

    fn scale(&self) -> f64 {
        self.scale
    }
}

fn observe_density(basis: &Basis, rho: &DMatrix<Complex64>) -> Snapshot {
    let bd = basis.bath_dim;
    let m = basis.modes();
    let mut occ = vec![0.0; m];
    let mut top = vec![0.0; m];
    let mut sx = 0.0;
    let mut sz = 0.0;
    let mut tr = 0.0;
    for r in 0..bd {
        let p0 = rho[(r, r)].re;
        let p1 = rho[(bd + r, bd + r)].re;
        sx += 2.0 * rho[(bd + r, r)].re;
        sz += p1 - p0;
        tr += p0 + p1;
        for i in 0..m {
            let n = basis.occupation[i][r] as usize;
            occ[i] += n as f64 * (p0 + p1);
            if n == basis.n_max[i] {
                top[i] += p0 + p1;
            }
        }
    }
    Snapshot { sx, sz, occupations: occ, top, norm: tr }
}

fn rk4_pass(lind: &Lindblad, basis: &Basis, rho0: &DMatrix<Complex64>, times: &[f64], h: f64, opts: &SimOptions) -> Result<Trace> {
    let mut rho = rho0.clone();
    let mut trace = Trace::default();
    let mut t = times[0];
    for &t_out in times {
        let span = t_out - t;
        let steps = (span / h).ceil() as usize;
        if steps > 0 {
            let dt = span / steps as f64;
            let half = Complex64::new(0.5 * dt, 0.0);
            let full = Complex64::new(dt, 0.0);
            for _ in 0..steps {
                let k1 = lind.apply(&rho);
                let k2 = lind.apply(&(&rho + &k1 * half));
                let k3 = lind.apply(&(&rho + &k2 * half));
                let k4 = lind.apply(&(&rho + &k3 * full));
                rho += (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * Complex64::new(dt / 6.0, 0.0);
            }
        }
        t = t_out;
        let s = observe_density(basis, &rho);
        let drift = (s.norm - 1.0).abs();
        if drift > 1e-8 {
            return Err(DynamicsError::DensityChecks { halvings: 0, reason: format!("trace drift {drift:.3e} at t = {t:.6e}") });
        }
        let herm = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        let min_eig = herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -opts.density_tol.max(1e-12) {
            return Err(DynamicsError::DensityChecks { halvings: 0, reason: format!("negative eigenvalue {min_eig:.3e} at t = {t:.6e}") });
        }
        if let Some((mode, &p)) = s.top.iter().enumerate().find(|(_, &p)| p > opts.eps_trunc) {
            return Err(DynamicsError::TruncationLeakage { mode, time: t, population: p, limit: opts.eps_trunc });
        }
        trace.push(s);
    }
    Ok(trace)
}

fn max_diff(a: &Trace, b: &Trace) -> f64 {
    let d = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let occ = a.occ.iter().zip(&b.occ).map(|(x, y)| d(x, y)).fold(0.0, f64::max);
    d(&a.sx, &b.sx).max(d(&a.sz, &b.sz)).max(occ)
}

fn run_density(ham: &Hamiltonian, modes: &ModeSet, init: &InitialCondition, times: &[f64], opts: &SimOptions) -> Result<(Trace, usize)> {
    let d = ham.dim();
    if d > opts.density_dim_cap {
        return Err(DynamicsError::DimensionCap { dim: d, cap: opts.density_dim_cap });
    }
    let rho0 = match init.bath {
        BathInit::Thermal { temperature } if temperature > 0.0 => {
            let q = init.qubit.amplitudes();
            let probs: Vec<Vec<f64>> = modes
                .modes
                .iter()
                .map(|m| {
                    let nbar = bose(m.omega, temperature)?;
                    let x = nbar / (1.0 + nbar);
                    let p: Vec<f64> = (0..=m.n_max).map(|n| x.powi(n as i32)).collect();
                    let z: f64 = p.iter().sum();
                    Ok(p.into_iter().map(|v| v / z).collect())
                })
                .collect::<Result<_>>()?;
            let bd = ham.basis.bath_dim;
            let pb: Vec<f64> = (0..bd).map(|r| probs.iter().enumerate().map(|(i, p)| p[ham.basis.occupation[i][r] as usize]).product()).collect();
            let mut rho = DMatrix::<Complex64>::zeros(d, d);
            for a in 0..2 {
                for b in 0..2 {
                    for r in 0..bd {
                        rho[(a * bd + r, b * bd + r)] = q[a] * q[b].conj() * pb[r];
                    }
                }
            }
            rho
        }
        _ => {
            let psi = DMatrix::from_column_slice(d, 1, &initial_pure(ham, modes, init, opts, None)?);
            &psi * psi.adjoint()
        }
    };
    let lind = Lindblad::new(ham, modes, opts.dissipator_temperature)?;
    let mut h = 0.1 / lind.scale().max(1e-300);
    let mut coarse = rk4_pass(&lind, &ham.basis, &rho0, times, h, opts);
    for halvings in 1..=opts.max_halvings {
        h *= 0.5;
        let fine = rk4_pass(&lind, &ham.basis, &rho0, times, h, opts);
        match (&coarse, fine) {
            (_, Err(e @ DynamicsError::TruncationLeakage { .. })) => return Err(e),
            (Ok(c), Ok(f)) if max_diff(c, &f) <= opts.density_tol => return Ok((f, halvings)),
            (_, f) => coarse = f,
        }
    }
    let reason = match coarse {
        Err(e) => e.to_string(),
        Ok(_) => format!("step-halving difference above {:.1e}", opts.density_tol),
    };
    Err(DynamicsError::DensityChecks { halvings: opts.max_halvings, reason })
}

fn run_once(modes: &ModeSet, delta_eff: f64, init: &InitialCondition, times: &[f64], opts: &SimOptions) -> Result<SimResult> {
    check_times(times)?;
    let ham = effective_hamiltonian(modes, delta_eff, opts.dim_cap)?;
    let (trace, propagation) = if modes.dissipative() {
        let (t, h) = run_density(&ham, modes, init, times, opts)?;
        (t, Propagation::DensityMatrix { halvings: h })
    } else {
        match init.bath {
            BathInit::Thermal { temperature } if temperature > 0.0 => {
                let t = run_sampled(&ham, modes, init, times, opts, temperature)?;
                (t, Propagation::Sampled { samples: opts.thermal_samples.max(1) })
            }
            _ => {
                let psi0 = initial_pure(&ham, modes, init, opts, None)?;
                (run_state_vector(&ham, psi0, times, opts)?, Propagation::StateVector)
            }
        }
    };
    Ok(SimResult {
        times: times.to_vec(),
        sx: trace.sx,
        sz: trace.sz,
        occupations: trace.occ,
        norm_deviation: trace.norm,
        leakage: trace.leak,
        n_max: modes.n_max(),
        propagation,
        fingerprint: fingerprint(&(modes, delta_eff.to_bits(), init, times, opts)),
    })
}

/// Evolve under the effective Hamiltonian. Damped modes switch to the density-matrix path.
/// Truncation leakage triggers a retry with two more levels on the offending mode.
pub fn evolve_effective(modes: &ModeSet, delta_eff: f64, init: &InitialCondition, times: &[f64], opts: &SimOptions) -> Result<SimResult> {
    let mut current = modes.clone();
    let mut attempt = 0;
    loop {
        match run_once(&current, delta_eff, init, times, opts) {
            Err(DynamicsError::TruncationLeakage { mode, .. }) if attempt < opts.retries => {
                current.modes[mode].n_max += 2;
                attempt += 1;
            }
            other => return other,
        }
    }
}
