use circuit_core::SpectralGrid;

use crate::error::{Result, SynthesisError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub count: usize,
}

/// Ordinary least squares J = slope x + intercept over lo <= x <= hi.
pub fn linear_fit(grid: &SpectralGrid, lo: f64, hi: f64) -> Result<LinearFit> {
    let pts: Vec<(f64, f64)> = grid
        .omega
        .iter()
        .zip(&grid.j)
        .filter(|(&x, _)| x >= lo && x <= hi)
        .map(|(&x, &y)| (x, y))
        .collect();
    let n = pts.len();
    if n < 2 {
        return Err(SynthesisError::FitBand { lo, hi, count: n });
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(LinearFit { slope, intercept: my - slope * mx, count: n })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFit {
    pub exponent: f64,
    /// c in J = c x^s
    pub prefactor: f64,
    /// RMS of the log deviation
    pub residual: f64,
    /// Samples dropped for J <= 0
    pub excluded: usize,
}

/// Log-log least squares for J = c x^s over [lo, hi].
pub fn fit_spectral_exponent(grid: &SpectralGrid, lo: f64, hi: f64) -> Result<SpectralFit> {
    let mut excluded = 0;
    let mut pts = Vec::new();
    for (&x, &y) in grid.omega.iter().zip(&grid.j) {
        if x < lo || x > hi {
            continue;
        }
        if y > 0.0 && x > 0.0 {
            pts.push((x.ln(), y.ln()));
        } else {
            excluded += 1;
        }
    }
    let n = pts.len();
    if n < 2 {
        return Err(SynthesisError::FitBand { lo, hi, count: n });
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let s = sxy / sxx;
    let b = my - s * mx;
    let residual = (pts.iter().map(|p| (p.1 - b - s * p.0).powi(2)).sum::<f64>() / nf).sqrt();
    Ok(SpectralFit { exponent: s, prefactor: b.exp(), residual, excluded })
}
