//! Compact forms of the A/B factors through second order in `p̂₁`, keeping
//! every order in `q̂₁`.

use num_complex::Complex64;

use super::series::{FunctionId, Sign, INNER_CAP, INNER_TOLERANCE};
use crate::error::{Error, Result};
use crate::special::{binomial, hermite_all};

/// Coefficients of `p̂₁⁰`, `p̂₁¹`, `p̂₁²`; each entry is indexed by the `q̂₁` power.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedForm {
    pub id: FunctionId,
    pub orders: [Vec<Complex64>; 3],
}

impl OrderedForm {
    /// Coefficient of `p̂₁^k q̂₁^{l_q}`, zero beyond the stored range.
    pub fn coefficient(&self, k: usize, lq: usize) -> Complex64 {
        self.orders
            .get(k)
            .and_then(|o| o.get(lq))
            .copied()
            .unwrap_or_default()
    }
}

fn s0(p0: f64) -> f64 {
    1.0 / (1.0 + p0 * p0).sqrt()
}

/// Second-order forms. `cap_q` bounds the `q̂₁` series of A₂ and B₂.
pub fn ordered_p1_forms(id: FunctionId, p0: f64, q0: f64, cap_q: u32) -> Result<OrderedForm> {
    if !(p0.abs() < 1.0) {
        return Err(Error::invalid("p0", "series require |p0| < 1"));
    }
    let s = s0(p0);
    let s2 = s * s;
    let s4 = s2 * s2;
    let re = |x: f64| vec![Complex64::from(x)];
    let orders = match id {
        FunctionId::A1 => {
            let lead = s.sqrt();
            [
                re(lead),
                re(-lead * 0.5 * p0 * s2),
                re(lead * (3.0 * p0 * p0 - 2.0) / 8.0 * s4),
            ]
        }
        FunctionId::B0(sign) => {
            let c = Complex64::new(0.0, -sign.value());
            [vec![Complex64::from(1.0)], vec![c], vec![c * c / 2.0]]
        }
        FunctionId::B1(sign) => {
            let sg = sign.value();
            let lead = Complex64::new(0.0, 0.5 * sg * p0.atan()).exp();
            [
                vec![lead],
                vec![lead * Complex64::new(0.0, 0.5 * sg) * s2],
                vec![-lead * Complex64::new(1.0, 4.0 * sg * p0) / 8.0 * s4],
            ]
        }
        FunctionId::A2 => a2_hermite_form(p0, q0, cap_q),
        FunctionId::B2(sign) => b2_first_form(sign, p0, q0, cap_q)?,
    };
    Ok(OrderedForm { id, orders })
}

/// A₂ via Hermite polynomials of `s₀q₀`.
fn a2_hermite_form(p0: f64, q0: f64, cap_q: u32) -> [Vec<Complex64>; 3] {
    let s = s0(p0);
    let s2 = s * s;
    let s4 = s2 * s2;
    let x = s * q0;
    let h = hermite_all(cap_q as usize + 1, x);
    let pre = (-x * x).exp();
    let mut o = [Vec::new(), Vec::new(), Vec::new()];
    let mut fact = 1.0;
    for lq in 0..=cap_q as usize {
        if lq > 0 {
            fact *= lq as f64;
        }
        let l = lq as f64;
        let base = pre * (-s).powi(lq as i32) / fact;
        let c0 = h[lq];
        let c1 = -s2 * p0 * (l * h[lq] - x * h[lq + 1]);
        let c2 = s4
            * ((p0 * p0 / 2.0 * (l - 2.0 * x * x) * (l + 1.0) - l / 2.0) * h[lq]
                + (p0 * p0 * x * (x * x - l - 1.0) + x / 2.0) * h[lq + 1]);
        o[0].push(Complex64::from(base * c0));
        o[1].push(Complex64::from(base * c1));
        o[2].push(Complex64::from(base * c2));
    }
    o
}

/// B₂ from its first, un-resummed line: for each `l_q`,
/// `Σ_n (∓i)^n/n! C(2n, l_q) s₀^{2n} q₀^{2n−l_q} (p₀+p̂₁)^n [1 − 2n s₀²p₀p̂₁ + ((2n²+n)p₀² − n)s₀⁴p̂₁²]`.
fn b2_first_form(sign: Sign, p0: f64, q0: f64, cap_q: u32) -> Result<[Vec<Complex64>; 3]> {
    let s = s0(p0);
    let s2 = s * s;
    let s4 = s2 * s2;
    let base = Complex64::new(0.0, -sign.value());
    let mut o = [Vec::new(), Vec::new(), Vec::new()];
    for lq in 0..=cap_q {
        let start = (lq as u64).div_ceil(2);
        let mut acc = [Complex64::default(); 3];
        let pw = |k: i64| if k == 0 { 1.0 } else if k < 0 { 0.0 } else { p0.powi(k as i32) };
        let mut fact = (1..=start).fold(1.0, |a, k| a * k as f64);
        let mut last = 0.0f64;
        let mut converged = false;
        for it in 0..INNER_CAP as u64 {
            let n = start + it;
            if it > 0 {
                fact *= n as f64;
            }
            let nf = n as f64;
            let qpow = 2 * n as i64 - lq as i64;
            let qf = if qpow == 0 { 1.0 } else { q0.powi(qpow as i32) };
            let a = binomial(2 * n, lq as u64) * s2.powi(n as i32) * qf / fact;
            let ni = n as i64;
            let t0 = pw(ni);
            let t1 = nf * pw(ni - 1) - 2.0 * nf * s2 * pw(ni + 1);
            let t2 = binomial(n, 2) * pw(ni - 2) - 2.0 * nf * nf * s2 * pw(ni)
                + ((2.0 * nf * nf + nf) * p0 * p0 - nf) * s4 * pw(ni);
            let phase = base.powu((n % 4) as u32);
            for (slot, t) in acc.iter_mut().zip([t0, t1, t2]) {
                *slot += phase * a * t;
            }
            let size = a.abs() * (t0.abs() + t1.abs() + t2.abs());
            let scale: f64 = acc.iter().map(|c| c.norm()).sum();
            if q0 == 0.0 || (size == 0.0 && it > 8) {
                converged = true;
                break;
            }
            if it > 2 && last > 0.0 {
                let ratio = size / last;
                if ratio < 1.0 && size * ratio / (1.0 - ratio) <= INNER_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
                    converged = true;
                    break;
                }
            }
            last = size;
        }
        if !converged {
            return Err(Error::NonConvergence {
                what: "B2 ordered form".into(),
                iterations: INNER_CAP,
                partial: acc[0].norm(),
            });
        }
        for (k, v) in acc.into_iter().enumerate() {
            o[k].push(v);
        }
    }
    Ok(o)
}
