use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{DynamicsError, Result};

pub trait OdeSystem {
    fn deriv(&mut self, t: f64, y: &[Complex64], dy: &mut [Complex64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// 0 means no limit
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-11, h_max: 0.0, max_steps: 50_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

const PAR: usize = 1 << 14;

// Dormand-Prince 5(4) tableau
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn combo(out: &mut [Complex64], y: &[Complex64], h: f64, ks: &[Vec<Complex64>], coef: &[f64]) {
    let f = |i: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &c) in ks.iter().zip(coef) {
            if c != 0.0 {
                acc += k[i] * c;
            }
        }
        y[i] + acc * h
    };
    if out.len() >= PAR {
        out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
    } else {
        out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
    }
}

fn error_norm(y: &[Complex64], yn: &[Complex64], ks: &[Vec<Complex64>], h: f64, ctl: &StepControl) -> f64 {
    let term = |i: usize| -> f64 {
        let mut e = Complex64::new(0.0, 0.0);
        for (k, &c) in ks.iter().zip(&E) {
            if c != 0.0 {
                e += k[i] * c;
            }
        }
        let sc = ctl.atol + ctl.rtol * y[i].norm().max(yn[i].norm());
        (e * h).norm_sqr() / (sc * sc)
    };
    let s: f64 = if y.len() >= PAR { (0..y.len()).into_par_iter().map(term).sum() } else { (0..y.len()).map(term).sum() };
    (s / y.len() as f64).sqrt()
}

/// Adaptive integration through each output time in order; `on_output` sees the state there.
pub fn integrate_dp54<S, F>(
    sys: &mut S,
    t0: f64,
    y0: Vec<Complex64>,
    outputs: &[f64],
    ctl: &StepControl,
    mut on_output: F,
) -> Result<(Vec<Complex64>, OdeStats)>
where
    S: OdeSystem,
    F: FnMut(usize, f64, &[Complex64]) -> Result<()>,
{
    let n = y0.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut y = y0;
    let mut ks: Vec<Vec<Complex64>> = (0..7).map(|_| vec![zero; n]).collect();
    let mut tmp = vec![zero; n];
    let mut t = t0;
    let mut stats = OdeStats::default();
    sys.deriv(t, &y, &mut ks[0]);
    let mut h = {
        let span = outputs.last().map(|&te| te - t0).unwrap_or(0.0).abs();
        let scale = ks[0].iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        (0.01 / scale).min(if span > 0.0 { span } else { f64::INFINITY })
    };
    for (idx, &t_out) in outputs.iter().enumerate() {
        if t_out < t {
            return Err(DynamicsError::Integrator { time: t, reason: "output times must be nondecreasing".into() });
        }
        while t < t_out {
            if stats.accepted + stats.rejected >= ctl.max_steps {
                return Err(DynamicsError::Integrator { time: t, reason: "step budget exhausted".into() });
            }
            if ctl.h_max > 0.0 {
                h = h.min(ctl.h_max);
            }
            let last = t + h >= t_out;
            let hs = if last { t_out - t } else { h };
            for s in 1..7 {
                combo(&mut tmp, &y, hs, &ks[..s], &A[s][..s]);
                let (head, tail) = ks.split_at_mut(s);
                let _ = head;
                sys.deriv(t + C[s] * hs, &tmp, &mut tail[0]);
            }
            // stage 7 evaluated at the 5th-order solution (FSAL)
            combo(&mut tmp, &y, hs, &ks[..6], &A[6]);
            let err = {
                let (head, tail) = ks.split_at_mut(6);
                let _ = head;
                sys.deriv(t + hs, &tmp, &mut tail[0]);
                error_norm(&y, &tmp, &ks, hs, ctl)
            };
            if !err.is_finite() {
                return Err(DynamicsError::Integrator { time: t, reason: "non-finite error estimate".into() });
            }
            if err <= 1.0 {
                t = if last { t_out } else { t + hs };
                std::mem::swap(&mut y, &mut tmp);
                ks.swap(0, 6);
                stats.accepted += 1;
            } else {
                stats.rejected += 1;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            let h_new = hs * fac;
            // keep the unclipped step size after hitting an output time
            h = if last && err <= 1.0 { h.max(h_new) } else { h_new };
            if h < 1e-14 * t.abs().max(1e-30) {
                return Err(DynamicsError::Integrator { time: t, reason: "step size underflow".into() });
            }
        }
        on_output(idx, t, &y)?;
    }
    Ok((y, stats))
}
