use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{DynamicsError, Result};

const PAR_THRESHOLD: usize = 1 << 14;

/// Fock product basis for the modes; the qubit index is most significant.
#[derive(Debug, Clone)]
pub struct Basis {
    pub n_max: Vec<usize>,
    pub strides: Vec<usize>,
    pub bath_dim: usize,
    /// occupation[i][r] = n_i of bath index r
    pub occupation: Vec<Vec<u8>>,
}

impl Basis {
    pub fn new(n_max: &[usize], qubit_levels: usize, cap: usize) -> Result<Self> {
        let mut bath_dim: usize = 1;
        for &n in n_max {
            if n > 250 {
                return Err(DynamicsError::InvalidParameter { field: "n_max", value: n as f64 });
            }
            bath_dim = bath_dim
                .checked_mul(n + 1)
                .filter(|d| d.saturating_mul(qubit_levels) <= cap)
                .ok_or(DynamicsError::DimensionCap { dim: usize::MAX, cap })?;
        }
        let dim = bath_dim * qubit_levels;
        if dim > cap {
            return Err(DynamicsError::DimensionCap { dim, cap });
        }
        let m = n_max.len();
        let mut strides = vec![1usize; m];
        for i in (0..m.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * (n_max[i + 1] + 1);
        }
        let occupation = (0..m)
            .map(|i| (0..bath_dim).map(|r| ((r / strides[i]) % (n_max[i] + 1)) as u8).collect())
            .collect();
        Ok(Self { n_max: n_max.to_vec(), strides, bath_dim, occupation })
    }

    pub fn modes(&self) -> usize {
        self.n_max.len()
    }

    pub fn total_photons(&self, r: usize) -> usize {
        self.occupation.iter().map(|o| o[r] as usize).sum()
    }
}

/// H = diag(E_q) + sum w_i n_i + X_q (s(t) + sum lambda_i (b_i + b_i^dag)).
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub basis: Basis,
    pub qubit_energies: Vec<f64>,
    /// <k|X|k+1>
    pub qubit_x: Vec<f64>,
    pub mode_freqs: Vec<f64>,
    pub mode_coeffs: Vec<f64>,
    pub static_x: f64,
    bath_energy: Vec<f64>,
    sqrt: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(
        basis: Basis,
        qubit_energies: Vec<f64>,
        qubit_x: Vec<f64>,
        mode_freqs: Vec<f64>,
        mode_coeffs: Vec<f64>,
        static_x: f64,
    ) -> Self {
        assert_eq!(qubit_x.len() + 1, qubit_energies.len());
        assert_eq!(mode_freqs.len(), basis.modes());
        assert_eq!(mode_coeffs.len(), basis.modes());
        let bath_energy = (0..basis.bath_dim)
            .map(|r| mode_freqs.iter().zip(&basis.occupation).map(|(w, o)| w * o[r] as f64).sum())
            .collect();
        let nmax = basis.n_max.iter().copied().max().unwrap_or(0);
        let sqrt = (0..=nmax + 1).map(|n| (n as f64).sqrt()).collect();
        Self { basis, qubit_energies, qubit_x, mode_freqs, mode_coeffs, static_x, bath_energy, sqrt }
    }

    pub fn levels(&self) -> usize {
        self.qubit_energies.len()
    }

    pub fn dim(&self) -> usize {
        self.levels() * self.basis.bath_dim
    }

    /// y += lambda_i (b_i + b_i^dag) x for one mode; blocks of stride*(n_max+1) are independent.
    fn add_mode(&self, i: usize, x: &[Complex64], y: &mut [Complex64], par: bool) {
        let lam = self.mode_coeffs[i];
        if lam == 0.0 {
            return;
        }
        let st = self.basis.strides[i];
        let top = self.basis.n_max[i];
        let block = st * (top + 1);
        let sqrt = &self.sqrt;
        let level = move |n: usize, xb: &[Complex64], yc: &mut [Complex64]| {
            let seg = n * st;
            if n < top {
                let c = lam * sqrt[n + 1];
                let up = &xb[seg + st..seg + 2 * st];
                yc.iter_mut().zip(up).for_each(|(v, u)| *v += u * c);
            }
            if n > 0 {
                let c = lam * sqrt[n];
                let down = &xb[seg - st..seg];
                yc.iter_mut().zip(down).for_each(|(v, d)| *v += d * c);
            }
        };
        let do_block = |xb: &[Complex64], yb: &mut [Complex64]| {
            yb.chunks_mut(st).enumerate().for_each(|(n, yc)| level(n, xb, yc));
        };
        if !par {
            y.chunks_mut(block).zip(x.chunks(block)).for_each(|(yb, xb)| do_block(xb, yb));
        } else if y.len() / block >= 64 {
            y.par_chunks_mut(block).zip(x.par_chunks(block)).for_each(|(yb, xb)| do_block(xb, yb));
        } else {
            for (yb, xb) in y.chunks_mut(block).zip(x.chunks(block)) {
                yb.par_chunks_mut(st).enumerate().for_each(|(n, yc)| level(n, xb, yc));
            }
        }
    }

    /// out = -i H(t) psi, with `drive` the extra X amplitude at this time.
    pub fn apply_derivative(&self, drive: f64, psi: &[Complex64], out: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let bd = self.basis.bath_dim;
        let q = self.levels();
        let s = self.static_x + drive;
        scratch.resize(q * bd, Complex64::new(0.0, 0.0));
        let par = q * bd >= PAR_THRESHOLD;
        for k in 0..q {
            let x = &psi[k * bd..(k + 1) * bd];
            let y = &mut scratch[k * bd..(k + 1) * bd];
            if par {
                y.par_iter_mut().zip(x.par_iter()).for_each(|(v, u)| *v = u * s);
            } else {
                y.iter_mut().zip(x).for_each(|(v, u)| *v = u * s);
            }
            for i in 0..self.basis.modes() {
                self.add_mode(i, x, y, par);
            }
        }
        let scratch = &scratch[..];
        let fill = |k: usize, r0: usize, o: &mut [Complex64]| {
            let e = self.qubit_energies[k];
            let x = &psi[k * bd + r0..];
            let energy = &self.bath_energy[r0..];
            let below = (k > 0).then(|| (&scratch[(k - 1) * bd + r0..], self.qubit_x[k - 1]));
            let above = (k + 1 < q).then(|| (&scratch[(k + 1) * bd + r0..], self.qubit_x[k]));
            for r in 0..o.len() {
                let mut h = x[r] * (e + energy[r]);
                if let Some((b, c)) = below {
                    h += b[r] * c;
                }
                if let Some((a, c)) = above {
                    h += a[r] * c;
                }
                // -i h
                o[r] = Complex64::new(h.im, -h.re);
            }
        };
        for k in 0..q {
            let o = &mut out[k * bd..(k + 1) * bd];
            if par {
                const CHUNK: usize = 4096;
                o.par_chunks_mut(CHUNK).enumerate().for_each(|(c, oc)| fill(k, c * CHUNK, oc));
            } else {
                fill(k, 0, o);
            }
        }
    }

    /// <psi|H|psi> for a normalised state.
    pub fn energy(&self, drive: f64, psi: &[Complex64]) -> f64 {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        let mut scratch = Vec::new();
        self.apply_derivative(drive, psi, &mut out, &mut scratch);
        // out = -i H psi
        psi.iter().zip(&out).map(|(a, b)| (a.conj() * b * Complex64::new(0.0, 1.0)).re).sum()
    }

    /// Dense matrix of H at a given X drive amplitude (small systems only).
    pub fn dense(&self, drive: f64) -> nalgebra::DMatrix<Complex64> {
        let d = self.dim();
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(d, d);
        let mut e = vec![Complex64::new(0.0, 0.0); d];
        let mut col = vec![Complex64::new(0.0, 0.0); d];
        let mut scratch = Vec::new();
        for j in 0..d {
            e.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            self.apply_derivative(drive, &e, &mut col, &mut scratch);
            for i in 0..d {
                // undo the -i
                m[(i, j)] = col[i] * Complex64::new(0.0, 1.0);
            }
        }
        m
    }
}
