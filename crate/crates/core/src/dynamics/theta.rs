//! Fock-resolved rotation angles `Θ_n`.
//!
//! `Θ_n = Ω₀t · Σ_m (−η²/2)^m / m! · H_{2m}(ξ) · F_m(n)` with the integer
//! `F_m(n) = ₂F₁(1+n, −m; 1; 2)`. For large `n η²` the terms grow far beyond
//! the sum before they alternate back down, so the series is summed in
//! binary floating point with as many mantissa bits as the observed
//! cancellation requires.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::special::{half_hypergeometric_table, BigFloat, FockHypergeometric};

/// Controls for the adaptive series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    /// Relative size below which three consecutive terms end the sum.
    pub rel_tol: f64,
    /// Largest `m` attempted.
    pub m_cap: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            m_cap: 2000,
        }
    }
}

/// Outcome of the adaptive series.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSeries {
    /// `Θ_n`, rad.
    pub value: f64,
    /// `Θ_n / Ω₀t`.
    pub factor: f64,
    /// Smallest `M` such that every partial sum through index `k ≥ M` lies
    /// within `rel_tol` of the final sum.
    pub converged_at: usize,
    /// Number of terms summed.
    pub terms: usize,
    /// Bound on the accumulated rounding error of `factor`.
    pub rounding_bound: f64,
    /// Mantissa bits used in the final pass.
    pub precision: u64,
}

const START_PRECISION: u64 = 192;
const GUARD_BITS: u64 = 96;

/// `Θ_n` with the default tolerance `1e−9`.
pub fn theta_n(n: u64, eta: f64, xi: f64, omega_t: f64) -> Result<f64> {
    Ok(theta_n_series(n, eta, xi, omega_t, SeriesOptions::default())?.value)
}

/// `Θ_n` with explicit controls and convergence diagnostics.
pub fn theta_n_series(n: u64, eta: f64, xi: f64, omega_t: f64, opts: SeriesOptions) -> Result<ThetaSeries> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::invalid("eta", "must be finite and non-negative"));
    }
    if !xi.is_finite() || !omega_t.is_finite() {
        return Err(Error::invalid("xi/omega_t", "must be finite"));
    }
    if !(opts.rel_tol > 0.0 && opts.rel_tol < 1.0) {
        return Err(Error::invalid("rel_tol", "must lie in (0, 1)"));
    }
    let mut prec = START_PRECISION;
    loop {
        let pass = series_pass(n, eta, xi, opts, prec)?;
        if pass.cancellation_bits + GUARD_BITS <= prec {
            let factor = pass.sum;
            return Ok(ThetaSeries {
                value: omega_t * factor,
                factor,
                converged_at: pass.converged_at,
                terms: pass.terms,
                rounding_bound: pass.rounding_bound,
                precision: prec,
            });
        }
        prec = pass.cancellation_bits + GUARD_BITS + 64;
    }
}

struct Pass {
    sum: f64,
    converged_at: usize,
    terms: usize,
    rounding_bound: f64,
    cancellation_bits: u64,
}

fn series_pass(n: u64, eta: f64, xi: f64, opts: SeriesOptions, prec: u64) -> Result<Pass> {
    let half_eta2 = BigFloat::from_f64(eta).mul(&BigFloat::from_f64(eta), prec).mul_pow2(-1).neg();
    let two_xi = BigFloat::from_f64(xi).mul_pow2(1);
    let mut coef = BigFloat::one(); // (−η²/2)^m / m!
    let mut h_prev = BigFloat::one(); // H_{2m}(ξ)
    let mut h_odd = two_xi.clone(); // H_{2m+1}(ξ)
    let mut f = FockHypergeometric::new(n);
    let mut sum = BigFloat::zero();
    let mut partials: Vec<f64> = Vec::new();
    let mut small_run = 0;
    let mut max_log2 = f64::NEG_INFINITY;
    let mut abs_total = 0.0f64;
    for m in 0..=opts.m_cap {
        if m > 0 {
            coef = coef.mul(&half_eta2, prec).div_u64(m as u64, prec);
            // H_{2m} = 2ξ H_{2m−1} − 2(2m−1) H_{2m−2}, then H_{2m+1}.
            let k = 2 * m as i64 - 1;
            let h_even = two_xi.mul(&h_odd, prec).sub(&h_prev.mul_i64(2 * k, prec), prec);
            let h_next = two_xi.mul(&h_even, prec).sub(&h_odd.mul_i64(2 * (k + 1), prec), prec);
            h_prev = h_even;
            h_odd = h_next;
        }
        let fm = f.next().expect("unbounded iterator");
        let term = coef.mul(&h_prev, prec).mul_int(&fm, prec);
        sum = sum.add(&term, prec);
        let t = term.to_f64();
        let s = sum.to_f64();
        partials.push(s);
        if !term.is_zero() {
            max_log2 = max_log2.max(term.log2_abs());
        }
        abs_total += t.abs();
        if t.abs() < opts.rel_tol * s.abs() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        let terminated = eta == 0.0;
        if small_run >= 3 || terminated {
            let final_sum = s;
            let mut converged_at = 0;
            for (k, p) in partials.iter().enumerate() {
                if (p - final_sum).abs() > opts.rel_tol * final_sum.abs() {
                    converged_at = k + 1;
                }
            }
            let cancellation_bits = if sum.is_zero() {
                prec
            } else {
                (max_log2 - sum.log2_abs()).max(0.0).ceil() as u64
            };
            let eps = 2f64.powi(-(prec.min(1000) as i32));
            return Ok(Pass {
                sum: final_sum,
                converged_at,
                terms: m + 1,
                rounding_bound: abs_total * (8.0 * (m as f64 + 1.0)) * eps,
                cancellation_bits,
            });
        }
    }
    Err(Error::NonConvergence {
        what: format!("Θ_n series (n = {n}, η = {eta}, ξ = {xi})"),
        iterations: opts.m_cap,
        partial: sum.to_f64(),
    })
}

/// Closed form at `ξ = 0`: `Θ_n = Ω₀t/√(1+2η²) · ₂F₁(½, −n; 1; 4η²/(1+2η²))`.
pub fn theta_n_aligned(n: u64, eta: f64, omega_t: f64) -> f64 {
    omega_t * aligned_factors(n as usize, eta)[n as usize]
}

/// `Θ_k/Ω₀t` for `k = 0…n_max` at `ξ = 0`.
pub fn aligned_factors(n_max: usize, eta: f64) -> Vec<f64> {
    let d = 1.0 + 2.0 * eta * eta;
    let z = 4.0 * eta * eta / d;
    let pre = 1.0 / d.sqrt();
    half_hypergeometric_table(n_max, z)
        .into_iter()
        .map(|g| pre * g)
        .collect()
}

/// `Θ_n/Ω₀t` for every `n ≤ n_max`, so that any pulse area costs one multiply.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaTable {
    pub eta: f64,
    pub xi: f64,
    factors: Vec<f64>,
}

impl ThetaTable {
    /// Closed form when `ξ = 0`, the adaptive series otherwise.
    pub fn new(n_max: usize, eta: f64, xi: f64) -> Result<Self> {
        if xi == 0.0 {
            if !(eta >= 0.0 && eta.is_finite()) {
                return Err(Error::invalid("eta", "must be finite and non-negative"));
            }
            Ok(Self {
                eta,
                xi,
                factors: aligned_factors(n_max, eta),
            })
        } else {
            Self::from_series(n_max, eta, xi, SeriesOptions::default())
        }
    }

    /// Every entry from the adaptive series, evaluated in parallel.
    pub fn from_series(n_max: usize, eta: f64, xi: f64, opts: SeriesOptions) -> Result<Self> {
        let factors = (0..=n_max as u64)
            .into_par_iter()
            .map(|n| theta_n_series(n, eta, xi, 1.0, opts).map(|s| s.factor))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { eta, xi, factors })
    }

    /// Extends the table in place to cover `n_max`.
    pub fn ensure(&mut self, n_max: usize) -> Result<()> {
        if n_max < self.factors.len() {
            return Ok(());
        }
        *self = Self::new(n_max, self.eta, self.xi)?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factor(&self, n: usize) -> f64 {
        self.factors[n]
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_zero_is_bare_area() {
        for n in [0u64, 5, 1000] {
            assert_eq!(theta_n(n, 0.0, 0.3, 1.25).unwrap(), 1.25);
            assert_eq!(theta_n_aligned(n, 0.0, 1.25), 1.25);
        }
    }

    #[test]
    fn aligned_ground_state() {
        let eta: f64 = 0.1;
        let v = theta_n_aligned(0, eta, 2.0);
        assert!((v - 2.0 / (1.0 + 2.0 * eta * eta).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn series_matches_closed_form() {
        for &n in &[0u64, 3, 10, 1000] {
            for &eta in &[0.005, 0.02, 0.1] {
                let s = theta_n_series(n, eta, 0.0, 1.0, SeriesOptions { rel_tol: 1e-12, m_cap: 2000 }).unwrap();
                let c = theta_n_aligned(n, eta, 1.0);
                assert!((s.value - c).abs() <= 1e-10 * c.abs(), "n={n} eta={eta}: {} vs {c}", s.value);
            }
        }
    }

    #[test]
    fn vacuum_resummation() {
        for &eta in &[0.0, 0.05, 0.1, 0.2, 0.3] {
            let s = theta_n(0, eta, 0.0, 1.0).unwrap();
            let expect = 1.0 / (1.0f64 + 2.0 * eta * eta).sqrt();
            assert!((s - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn convergence_counts() {
        let opts = SeriesOptions { rel_tol: 1e-3, m_cap: 2000 };
        assert_eq!(theta_n_series(2000, 0.01, 0.0, 1.0, opts).unwrap().converged_at, 4);
        assert_eq!(theta_n_series(2000, 0.02, 0.0, 1.0, opts).unwrap().converged_at, 11);
    }

    #[test]
    fn cap_reports_partial_value() {
        let opts = SeriesOptions { rel_tol: 1e-9, m_cap: 5 };
        match theta_n_series(20000, 0.02, 0.0, 1.0, opts) {
            Err(Error::NonConvergence { iterations, partial, .. }) => {
                assert_eq!(iterations, 5);
                assert!(partial.is_finite());
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn table_agrees_with_pointwise() {
        let t = ThetaTable::new(50, 0.03, 0.0).unwrap();
        let s = ThetaTable::from_series(50, 0.03, 0.0, SeriesOptions::default()).unwrap();
        for n in 0..=50 {
            assert!((t.factor(n) - s.factor(n)).abs() < 1e-9);
        }
    }
}
