//! Joint fit of the heating rate and the readout offset to delayed-gate curves.

use serde::{Deserialize, Serialize};
use std::cell::RefCell;

use super::nelder_mead::{nelder_mead, NelderMead};
use super::{optimize_rabi_from, optimize_rabi_table, HeatingModel};
use crate::dynamics::{p_up_table, thermal_cutoff, ThermalState, ThetaTable, DEFAULT_TAIL};
use crate::error::{Error, Result};

/// One bright-population measurement after a delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayPoint {
    /// Delay before the gate, s.
    pub delay: f64,
    pub p_up: f64,
    pub sigma: Option<f64>,
}

/// Measured optimal pulse area after a delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub delay: f64,
    pub omega_t_opt: f64,
}

/// The three curves of a delayed-gate experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HeatingData {
    pub static_curve: Vec<DelayPoint>,
    pub optimized_curve: Vec<DelayPoint>,
    pub optimal_rate: Vec<RatePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Initial temperature, held fixed.
    pub nbar0: f64,
    pub eta: f64,
    pub xi: f64,
    pub simplex: NelderMead,
    /// Log-spaced heating rates tried when seeding.
    pub seed_points: usize,
    /// Largest mean occupation the seed grid may reach at the last delay.
    pub nbar_ceiling: f64,
}

impl FitOptions {
    pub fn new(nbar0: f64, eta: f64, xi: f64) -> Self {
        Self {
            nbar0,
            eta,
            xi,
            simplex: NelderMead::default(),
            seed_points: 24,
            nbar_ceiling: 1e4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Heating rate, quanta per second.
    pub ndot: f64,
    /// Readout offset subtracted from the simulated `P↑`.
    pub delta_p: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    /// `s²(JᵀJ)⁻¹` over `(ṅ, δP↑)` from a finite-difference Jacobian.
    pub covariance: [[f64; 2]; 2],
    /// Pulse area calibrated at `n̄₀`.
    pub omega_t_static: f64,
}

const WEIGHT_FLOOR: f64 = 0.01;
const DP_SCALE: f64 = 0.01;
const PENALTY: f64 = 1e8;

/// Forward model with a lazily grown table and warm-started optimal areas.
struct CurveModel<'a> {
    data: &'a HeatingData,
    nbar0: f64,
    omega_st: f64,
    table: RefCell<ThetaTable>,
    warm: RefCell<Vec<f64>>,
}

impl<'a> CurveModel<'a> {
    fn new(data: &'a HeatingData, nbar0: f64, eta: f64, xi: f64) -> Result<Self> {
        let s0 = ThermalState::with_default_tail(nbar0)?;
        let table = ThetaTable::new(s0.n_max, eta, xi)?;
        let omega_st = optimize_rabi_table(&s0, &table)?;
        let n = data.optimized_curve.len() + data.optimal_rate.len();
        Ok(Self {
            data,
            nbar0,
            omega_st,
            table: RefCell::new(table),
            warm: RefCell::new(vec![omega_st; n]),
        })
    }

    fn state(&self, ndot: f64, delay: f64) -> Result<ThermalState> {
        let s = ThermalState::with_default_tail(self.nbar0 + ndot * delay)?;
        self.table.borrow_mut().ensure(s.n_max)?;
        Ok(s)
    }

    fn optimal(&self, slot: usize, s: &ThermalState) -> Result<f64> {
        let table = self.table.borrow();
        let guess = self.warm.borrow()[slot];
        let x = optimize_rabi_from(s, &table, guess)?;
        self.warm.borrow_mut()[slot] = x;
        Ok(x)
    }

    /// Weighted residuals at `(ṅ, δP↑)`.
    fn residuals(&self, ndot: f64, dp: f64) -> Result<Vec<f64>> {
        let mut r = Vec::with_capacity(self.len());
        for p in &self.data.static_curve {
            let s = self.state(ndot, p.delay)?;
            let sim = p_up_table(&s, &self.table.borrow(), self.omega_st)?;
            r.push((sim - dp - p.p_up) * weight(p.sigma));
        }
        let mut solved: Vec<(f64, f64)> = Vec::with_capacity(self.data.optimized_curve.len());
        for (i, p) in self.data.optimized_curve.iter().enumerate() {
            let s = self.state(ndot, p.delay)?;
            let x = self.optimal(i, &s)?;
            solved.push((p.delay, x));
            let sim = p_up_table(&s, &self.table.borrow(), x)?;
            r.push((sim - dp - p.p_up) * weight(p.sigma));
        }
        let off = self.data.optimized_curve.len();
        for (i, p) in self.data.optimal_rate.iter().enumerate() {
            let x = match solved.iter().find(|(d, _)| *d == p.delay) {
                Some(&(_, x)) => x,
                None => {
                    let s = self.state(ndot, p.delay)?;
                    self.optimal(off + i, &s)?
                }
            };
            r.push((x - p.omega_t_opt) / self.omega_st / WEIGHT_FLOOR);
        }
        Ok(r)
    }

    /// Closed-form offset minimising the cost at fixed `ṅ`.
    fn best_offset(&self, ndot: f64) -> Result<f64> {
        let r0 = self.residuals(ndot, 0.0)?;
        let (mut num, mut den) = (0.0, 0.0);
        let pts = self.data.static_curve.iter().chain(&self.data.optimized_curve);
        for (ri, p) in r0.iter().zip(pts) {
            let w = weight(p.sigma);
            num += ri * w;
            den += w * w;
        }
        Ok((num / den).clamp(0.0, 0.999))
    }

    fn len(&self) -> usize {
        self.data.static_curve.len() + self.data.optimized_curve.len() + self.data.optimal_rate.len()
    }
}

fn weight(sigma: Option<f64>) -> f64 {
    1.0 / sigma.unwrap_or(WEIGHT_FLOOR).max(WEIGHT_FLOOR)
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

fn validate(data: &HeatingData) -> Result<f64> {
    let mut delays: Vec<f64> = data
        .static_curve
        .iter()
        .chain(&data.optimized_curve)
        .map(|p| p.delay)
        .chain(data.optimal_rate.iter().map(|p| p.delay))
        .collect();
    for &d in &delays {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::invalid("delay", "must be finite and non-negative"));
        }
    }
    for p in data.static_curve.iter().chain(&data.optimized_curve) {
        // Noisy readout can stray slightly outside [0, 1].
        if !p.p_up.is_finite() {
            return Err(Error::invalid("p_up", "must be finite"));
        }
        if !(0.0..=1.0).contains(&p.p_up) {
            log::warn!("p_up = {} at delay {} lies outside [0, 1]", p.p_up, p.delay);
        }
        if let Some(s) = p.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::invalid("p_up_sigma", "must be positive"));
            }
        }
    }
    delays.sort_by(f64::total_cmp);
    delays.dedup();
    if delays.len() < 3 {
        return Err(Error::invalid("data", "need at least three distinct delays"));
    }
    let ps: Vec<f64> = data.static_curve.iter().chain(&data.optimized_curve).map(|p| p.p_up).collect();
    let flat = |v: &[f64]| v.iter().all(|x| (x - v[0]).abs() < 1e-12);
    let rates: Vec<f64> = data.optimal_rate.iter().map(|p| p.omega_t_opt).collect();
    if (ps.is_empty() || flat(&ps)) && (rates.is_empty() || flat(&rates)) {
        return Err(Error::invalid("data", "curves are constant; the heating rate is not identifiable"));
    }
    Ok(*delays.last().unwrap())
}

/// Noise-free curves for `model` at the given delays, with the readout
/// offset `delta_p` subtracted from both populations.
pub fn simulate_curves(model: HeatingModel, eta: f64, xi: f64, delays: &[f64], delta_p: f64) -> Result<HeatingData> {
    let n_max = thermal_cutoff(delays.iter().fold(0.0, |m: f64, &d| m.max(model.nbar(d))), DEFAULT_TAIL)?;
    let table = ThetaTable::new(n_max, eta, xi)?;
    let s0 = ThermalState::with_default_tail(model.nbar0)?;
    let st = optimize_rabi_table(&s0, &table)?;
    let mut out = HeatingData::default();
    for &d in delays {
        let s = ThermalState::with_default_tail(model.nbar(d))?;
        let opt = optimize_rabi_table(&s, &table)?;
        out.static_curve.push(DelayPoint {
            delay: d,
            p_up: p_up_table(&s, &table, st)? - delta_p,
            sigma: None,
        });
        out.optimized_curve.push(DelayPoint {
            delay: d,
            p_up: p_up_table(&s, &table, opt)? - delta_p,
            sigma: None,
        });
        out.optimal_rate.push(RatePoint {
            delay: d,
            omega_t_opt: opt,
        });
    }
    Ok(out)
}

/// Fits `(ṅ, δP↑)` to the delayed-gate curves with `n̄₀` held fixed.
///
/// A log grid of heating rates (each with its optimal offset) seeds a
/// Nelder–Mead search in scaled coordinates, which a few Gauss–Newton steps
/// then polish.
pub fn fit_heating(data: &HeatingData, opts: &FitOptions) -> Result<FitResult> {
    let t_max = validate(data)?;
    if t_max <= 0.0 {
        return Err(Error::invalid("delay", "at least one delay must be positive"));
    }
    if !(opts.nbar_ceiling > opts.nbar0) {
        return Err(Error::invalid("nbar_ceiling", "must exceed nbar0"));
    }
    let model = CurveModel::new(data, opts.nbar0, opts.eta, opts.xi)?;
    let ndot_max = (opts.nbar_ceiling - opts.nbar0) / t_max;

    let mut seed = (ndot_max, 0.0, f64::INFINITY);
    let k = opts.seed_points.max(2);
    for i in 0..k {
        let ndot = ndot_max * 10f64.powf(-5.0 * (1.0 - i as f64 / (k - 1) as f64));
        // Rates that heat past the first Rabi maximum are infeasible.
        let c = match model.best_offset(ndot).and_then(|dp| Ok((dp, cost(&model.residuals(ndot, dp)?)))) {
            Ok(v) => v,
            Err(Error::Bracket(_)) => continue,
            Err(e) => return Err(e),
        };
        let (dp, c) = c;
        if c < seed.2 {
            seed = (ndot, dp, c);
        }
    }
    if !seed.2.is_finite() {
        return Err(Error::Bracket("no seed heating rate keeps P↑ inside the calibration bracket".into()));
    }
    let scale = seed.0;
    let to_phys = |u: &[f64]| (u[0] * scale, u[1] * DP_SCALE);
    let objective = |u: &[f64]| -> Result<f64> {
        let (ndot, dp) = to_phys(u);
        if ndot < 0.0 || ndot > ndot_max || !(0.0..1.0).contains(&dp) {
            let over = (-ndot).max(ndot - ndot_max).max(0.0) / scale + (-dp).max(dp - 1.0).max(0.0) / DP_SCALE;
            return Ok(PENALTY * (1.0 + over));
        }
        match model.residuals(ndot, dp) {
            Ok(r) => Ok(cost(&r)),
            Err(Error::Bracket(_)) => Ok(PENALTY),
            Err(e) => Err(e),
        }
    };
    let simplex = nelder_mead(&objective, &[1.0, seed.1 / DP_SCALE], opts.simplex)?;
    let mut u = simplex.best.clone();
    let mut best = simplex.value;
    let mut iterations = simplex.iterations;

    let jac = |u: &[f64]| -> Result<(Vec<f64>, Vec<[f64; 2]>)> {
        let (ndot, dp) = to_phys(u);
        let r = model.residuals(ndot, dp)?;
        let h = 1e-6;
        let mut j = vec![[0.0; 2]; r.len()];
        for a in 0..2 {
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            up[a] += h;
            dn[a] -= h;
            if a == 1 && dn[1] < 0.0 {
                dn[1] = u[1];
            }
            let (n1, d1) = to_phys(&up);
            let (n0, d0) = to_phys(&dn);
            let r1 = model.residuals(n1, d1)?;
            let r0 = model.residuals(n0.max(0.0), d0)?;
            for (i, row) in j.iter_mut().enumerate() {
                row[a] = (r1[i] - r0[i]) / (up[a] - dn[a]);
            }
        }
        Ok((r, j))
    };
    let normal = |j: &[[f64; 2]]| {
        let mut m = [[0.0; 2]; 2];
        for row in j {
            for a in 0..2 {
                for b in 0..2 {
                    m[a][b] += row[a] * row[b];
                }
            }
        }
        m
    };
    for _ in 0..10 {
        let (r, j) = jac(&u)?;
        let m = normal(&j);
        let g = [
            j.iter().zip(&r).map(|(row, ri)| row[0] * ri).sum::<f64>(),
            j.iter().zip(&r).map(|(row, ri)| row[1] * ri).sum::<f64>(),
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let step = [(m[1][1] * g[0] - m[0][1] * g[1]) / det, (m[0][0] * g[1] - m[1][0] * g[0]) / det];
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..6 {
            let cand = [u[0] - t * step[0], (u[1] - t * step[1]).max(0.0)];
            let c = objective(&cand)?;
            if c < best {
                u = cand.to_vec();
                best = c;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        if !improved || (step[0].abs() + step[1].abs()) * t < 1e-12 {
            break;
        }
    }

    let (ndot, delta_p) = to_phys(&u);
    let (r, j) = jac(&u)?;
    let m = normal(&j);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let dof = r.len().saturating_sub(2).max(1) as f64;
    let s2 = cost(&r) / dof;
    let d = [scale, DP_SCALE];
    let inv = if det.abs() > 0.0 {
        [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
    } else {
        [[f64::INFINITY; 2]; 2]
    };
    let mut covariance = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            covariance[a][b] = s2 * inv[a][b] * d[a] * d[b];
        }
    }
    Ok(FitResult {
        ndot,
        delta_p,
        residual_norm: cost(&r).sqrt(),
        iterations,
        covariance,
        omega_t_static: model.omega_st,
    })
}
