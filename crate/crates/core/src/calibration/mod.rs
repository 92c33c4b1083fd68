//! Rabi-rate calibration, the delayed-gate heating model and the fits that
//! turn measured curves into heating rates.

mod fit;
mod nelder_mead;
mod power_law;

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::dynamics::{p_up_derivatives, p_up_table, ThermalState, ThetaTable};
use crate::error::{Error, Result};

pub use fit::{fit_heating, simulate_curves, DelayPoint, FitOptions, FitResult, HeatingData, RatePoint};
pub use nelder_mead::{nelder_mead, NelderMead, Simplex};
pub use power_law::{fit_power_law, PowerLawFit};

/// Constant heating from a fixed initial temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatingModel {
    pub nbar0: f64,
    /// Quanta per second.
    pub ndot: f64,
}

impl HeatingModel {
    pub fn new(nbar0: f64, ndot: f64) -> Result<Self> {
        if !(nbar0 >= 0.0 && nbar0.is_finite()) {
            return Err(Error::invalid("nbar0", "must be finite and non-negative"));
        }
        if !(ndot >= 0.0 && ndot.is_finite()) {
            return Err(Error::invalid("ndot", "must be finite and non-negative"));
        }
        Ok(Self { nbar0, ndot })
    }

    /// `n̄(Δt) = n̄₀ + ṅΔt`.
    pub fn nbar(&self, delay: f64) -> f64 {
        self.nbar0 + self.ndot * delay
    }
}

/// Search interval for the pulse area.
pub const RABI_BRACKET: (f64, f64) = (0.5 * FRAC_PI_2, 1.5 * PI);
const SAMPLES: usize = 33;
const GOLDEN_TOL: f64 = 1e-8;

/// Pulse area maximising the thermal `P↑` at `n̄`.
pub fn optimize_rabi(nbar: f64, eta: f64, xi: f64) -> Result<f64> {
    let state = ThermalState::with_default_tail(nbar)?;
    let table = ThetaTable::new(state.n_max, eta, xi)?;
    optimize_rabi_table(&state, &table)
}

/// Pulse area calibrated at the initial temperature.
pub fn static_rabi(nbar0: f64, eta: f64, xi: f64) -> Result<f64> {
    optimize_rabi(nbar0, eta, xi)
}

/// Maximiser of `P↑(Ω₀t)` over [`RABI_BRACKET`] with a precomputed table.
///
/// The bracket is sampled on a uniform grid, the first interior sample
/// maximum is refined by golden-section search and the result is polished
/// with Newton steps on the analytic derivatives.
pub fn optimize_rabi_table(state: &ThermalState, table: &ThetaTable) -> Result<f64> {
    if table.len() <= state.n_max {
        return Err(Error::invalid("theta table", "does not cover the thermal cutoff"));
    }
    // A single rotation angle: invert it directly.
    if state.n_max == 0 || table.eta == 0.0 {
        return Ok(FRAC_PI_2 / table.factor(0));
    }
    let f = |x: f64| p_up_table(state, table, x);
    let (lo, hi) = RABI_BRACKET;
    let h = (hi - lo) / (SAMPLES - 1) as f64;
    let ys = (0..SAMPLES).map(|i| f(lo + i as f64 * h)).collect::<Result<Vec<f64>>>()?;
    let peak = (1..SAMPLES - 1)
        .find(|&i| ys[i] >= ys[i - 1] && ys[i] >= ys[i + 1] && (ys[i] > ys[i - 1] || ys[i] > ys[i + 1]))
        .ok_or_else(|| {
            Error::Bracket(format!(
                "no interior maximum of P↑ in [{lo:.4}, {hi:.4}] at n̄ = {}",
                state.nbar
            ))
        })?;
    let (a, b) = (lo + (peak - 1) as f64 * h, lo + (peak + 1) as f64 * h);
    let x = golden_section_max(&f, a, b, GOLDEN_TOL)?;
    newton_polish(state, table, x, a, b)
}

/// Like [`optimize_rabi_table`] but starts Newton's method from `guess`,
/// falling back to the full search when the iteration leaves the bracket
/// or lands on a non-maximum.
pub fn optimize_rabi_from(state: &ThermalState, table: &ThetaTable, guess: f64) -> Result<f64> {
    if state.n_max == 0 || table.eta == 0.0 {
        return optimize_rabi_table(state, table);
    }
    let (lo, hi) = RABI_BRACKET;
    let mut x = guess;
    for _ in 0..30 {
        let (_, d1, d2) = p_up_derivatives(state, table, x)?;
        if d2 >= 0.0 {
            break;
        }
        let step = d1 / d2;
        x -= step;
        if !(lo..=hi).contains(&x) {
            break;
        }
        if step.abs() < 1e-13 * x.abs().max(1.0) {
            return Ok(x);
        }
    }
    optimize_rabi_table(state, table)
}

fn golden_section_max<F>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut it = 0;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
        it += 1;
        if it > 200 {
            return Err(Error::NonConvergence {
                what: "golden-section search".into(),
                iterations: it,
                partial: 0.5 * (a + b),
            });
        }
    }
    Ok(0.5 * (a + b))
}

fn newton_polish(state: &ThermalState, table: &ThetaTable, x0: f64, a: f64, b: f64) -> Result<f64> {
    let mut x = x0;
    for _ in 0..8 {
        let (_, d1, d2) = p_up_derivatives(state, table, x)?;
        if d2 >= 0.0 {
            return Ok(x0);
        }
        let step = d1 / d2;
        let next = x - step;
        if !(a..=b).contains(&next) || (next - x0).abs() > 2.0 * GOLDEN_TOL {
            return Ok(x0);
        }
        x = next;
        if step.abs() < 1e-14 * x.abs() {
            break;
        }
    }
    Ok(x)
}
