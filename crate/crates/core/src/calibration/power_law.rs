//! `ṅ = c·ω^{−α}` by least squares in log–log space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub prefactor: f64,
    /// Positive for a rate that falls with frequency.
    pub exponent: f64,
    /// Euclidean norm of the log-space residuals.
    pub residual_norm: f64,
}

impl PowerLawFit {
    pub fn predict(&self, omega: f64) -> f64 {
        self.prefactor * omega.powf(-self.exponent)
    }
}

/// Fits `(ω, ṅ)` pairs. Two points interpolate exactly.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 2 {
        return Err(Error::invalid("points", "need at least two (ω, ṅ) pairs"));
    }
    if points.iter().any(|&(w, r)| !(w > 0.0 && r > 0.0 && w.is_finite() && r.is_finite())) {
        return Err(Error::invalid("points", "frequencies and rates must be positive"));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("points", "all frequencies coincide"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_norm = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(PowerLawFit {
        prefactor: intercept.exp(),
        exponent: -slope,
        residual_norm,
    })
}
