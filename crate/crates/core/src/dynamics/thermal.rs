//! Thermal occupation of the dominant axial mode and the bright-state population.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::theta::ThetaTable;
use crate::error::{Error, Result};
use crate::special::pairwise_sum;

/// Default probability mass left beyond the Fock cutoff.
pub const DEFAULT_TAIL: f64 = 1e-6;

/// Chunk length for parallel sums; split points are fixed so results do not
/// depend on the number of worker threads.
const CHUNK: usize = 4096;

/// Smallest `n` with `Σ_{k>n} w_k = (n̄/(1+n̄))^{n+1} < tail`.
pub fn thermal_cutoff(nbar: f64, tail: f64) -> Result<usize> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::invalid("nbar", "must be finite and non-negative"));
    }
    if !(tail > 0.0 && tail < 1.0) {
        return Err(Error::invalid("tail", "must lie in (0, 1)"));
    }
    if nbar == 0.0 {
        return Ok(0);
    }
    let ln_r = -(1.0 / nbar).ln_1p();
    let mut n = ((tail.ln() / ln_r) - 1.0).floor().max(0.0) as usize;
    while ((n + 1) as f64 * ln_r).exp() >= tail {
        n += 1;
    }
    while n > 0 && ((n as f64) * ln_r).exp() < tail {
        n -= 1;
    }
    Ok(n)
}

/// Thermal state truncated at `n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    pub nbar: f64,
    pub n_max: usize,
}

impl ThermalState {
    /// Cutoff chosen so that the discarded tail is below `tail`.
    pub fn new(nbar: f64, tail: f64) -> Result<Self> {
        Ok(Self {
            nbar,
            n_max: thermal_cutoff(nbar, tail)?,
        })
    }

    pub fn with_default_tail(nbar: f64) -> Result<Self> {
        Self::new(nbar, DEFAULT_TAIL)
    }

    /// `w_n = n̄ⁿ/(1+n̄)^{n+1}` for `n ≤ n_max`.
    pub fn weights(&self) -> Vec<f64> {
        let r = self.nbar / (1.0 + self.nbar);
        let mut w = Vec::with_capacity(self.n_max + 1);
        let mut v = 1.0 / (1.0 + self.nbar);
        for _ in 0..=self.n_max {
            w.push(v);
            v *= r;
        }
        w
    }

    /// Probability mass beyond the cutoff.
    pub fn tail(&self) -> f64 {
        let r = self.nbar / (1.0 + self.nbar);
        r.powi(self.n_max as i32 + 1)
    }
}

/// `Σ_n f(n, w_n)` with a thread-count-independent summation order.
pub(crate) fn thermal_sum<F>(state: &ThermalState, f: F) -> f64
where
    F: Fn(usize, f64) -> f64 + Sync,
{
    let w = state.weights();
    if w.len() <= CHUNK {
        let terms: Vec<f64> = w.iter().enumerate().map(|(n, &wn)| f(n, wn)).collect();
        return pairwise_sum(&terms);
    }
    let partial: Vec<f64> = w
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let terms: Vec<f64> = chunk
                .iter()
                .enumerate()
                .map(|(i, &wn)| f(c * CHUNK + i, wn))
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    pairwise_sum(&partial)
}

fn check_table(state: &ThermalState, table: &ThetaTable) -> Result<()> {
    if table.len() <= state.n_max {
        return Err(Error::invalid(
            "theta table",
            format!("covers n ≤ {} but the state needs n ≤ {}", table.len().saturating_sub(1), state.n_max),
        ));
    }
    Ok(())
}

/// `P↑ = Σ_n w_n sin²(Ω₀t · Θ_n/Ω₀t)`.
pub fn p_up_table(state: &ThermalState, table: &ThetaTable, omega_t: f64) -> Result<f64> {
    check_table(state, table)?;
    Ok(thermal_sum(state, |n, w| {
        let s = (omega_t * table.factor(n)).sin();
        w * s * s
    }))
}

/// `P↑` and its first two derivatives in `Ω₀t`.
pub fn p_up_derivatives(state: &ThermalState, table: &ThetaTable, omega_t: f64) -> Result<(f64, f64, f64)> {
    check_table(state, table)?;
    let p = thermal_sum(state, |n, w| {
        let s = (omega_t * table.factor(n)).sin();
        w * s * s
    });
    let d1 = thermal_sum(state, |n, w| {
        let g = table.factor(n);
        w * g * (2.0 * omega_t * g).sin()
    });
    let d2 = thermal_sum(state, |n, w| {
        let g = table.factor(n);
        2.0 * w * g * g * (2.0 * omega_t * g).cos()
    });
    Ok((p, d1, d2))
}
