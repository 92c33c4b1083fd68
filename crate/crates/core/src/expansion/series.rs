//! Power-series coefficients of the amplitude (A) and phase (B) factors in the
//! operators `p̂₁` and `q̂₁`.
//!
//! With `P = p₀ + p̂₁` and `Q = q₀ + q̂₁`:
//!
//! | function | closed form                     |
//! |----------|---------------------------------|
//! | A₁       | `(1 + P²)^{-1/4}`               |
//! | A₂       | `exp(−Q²/(1 + P²))`             |
//! | B₀±      | `exp(∓i p̂₁)`                    |
//! | B₁±      | `exp(±(i/2) arctan P)`          |
//! | B₂±      | `exp(∓i P Q²/(1 + P²))`         |

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::binomial;

/// Relative size of the estimated tail at which an inner sum stops.
pub const INNER_TOLERANCE: f64 = 1e-12;
/// Hard cap on inner-sum iterations.
pub const INNER_CAP: usize = 1_000_000;

/// Which of the two conjugate phase factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `+1` for `Plus`.
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionId {
    A1,
    A2,
    B0(Sign),
    B1(Sign),
    B2(Sign),
}

impl FunctionId {
    pub fn label(self) -> String {
        match self {
            FunctionId::A1 => "A1".into(),
            FunctionId::A2 => "A2".into(),
            FunctionId::B0(s) => format!("B0{}", s.symbol()),
            FunctionId::B1(s) => format!("B1{}", s.symbol()),
            FunctionId::B2(s) => format!("B2{}", s.symbol()),
        }
    }
}

/// `coefficient · p̂₁^power_p · q̂₁^power_q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub coefficient: Complex64,
    pub power_p: u32,
    pub power_q: u32,
}

/// Highest powers emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub p: u32,
    pub q: u32,
}

impl Caps {
    pub fn new(p: u32, q: u32) -> Self {
        Self { p, q }
    }
}

/// Closed form evaluated at scalar `P = p₀ + p₁`, `Q = q₀ + q₁`.
pub fn closed_form(id: FunctionId, p: f64, q: f64) -> Complex64 {
    let i = Complex64::i();
    match id {
        FunctionId::A1 => Complex64::from((1.0 + p * p).powf(-0.25)),
        FunctionId::A2 => Complex64::from((-q * q / (1.0 + p * p)).exp()),
        FunctionId::B0(s) => (-s.value() * i * p).exp(),
        FunctionId::B1(s) => (s.value() * 0.5 * i * p.atan()).exp(),
        FunctionId::B2(s) => (-s.value() * i * p * q * q / (1.0 + p * p)).exp(),
    }
}

/// `Σ c · p₁^a · q₁^b`, summed in list order.
pub fn evaluate(terms: &[SeriesTerm], p1: f64, q1: f64) -> Complex64 {
    terms.iter().fold(Complex64::new(0.0, 0.0), |acc, t| {
        acc + t.coefficient * p1.powi(t.power_p as i32) * q1.powi(t.power_q as i32)
    })
}

/// `x^k` with `0^0 = 1`.
fn pow(x: f64, k: i64) -> f64 {
    if k == 0 {
        1.0
    } else {
        x.powi(k as i32)
    }
}

/// Stopping rule shared by the inner sums.
///
/// Zero terms are skipped when estimating the ratio, so series with
/// interleaved vanishing terms are not cut short. A run of exact zeros after
/// a nonzero term marks a terminating series.
struct TailMonitor {
    last: f64,
    seen: bool,
    zeros: usize,
}

impl TailMonitor {
    fn new() -> Self {
        Self {
            last: 0.0,
            seen: false,
            zeros: 0,
        }
    }

    /// Feeds `|t_k|`; returns true once the tail is negligible against `scale`.
    fn done(&mut self, t: f64, scale: f64) -> bool {
        if t == 0.0 {
            self.zeros += 1;
            return self.zeros >= if self.seen { 8 } else { 64 };
        }
        self.zeros = 0;
        let stop = self.seen && {
            let ratio = t / self.last;
            ratio < 1.0 && t * ratio / (1.0 - ratio) <= INNER_TOLERANCE * scale.max(f64::MIN_POSITIVE)
        };
        self.last = t;
        self.seen = true;
        stop
    }
}

/// Sums `term(k)` for `k = start, start+1, …` until the geometric tail
/// estimate drops below `INNER_TOLERANCE` of the running sum.
///
/// When `exact_at` is given the series has a single nonzero term there.
fn tail_sum<F>(start: u64, exact_at: Option<u64>, what: &str, mut term: F) -> Result<f64>
where
    F: FnMut(u64) -> f64,
{
    if let Some(k) = exact_at {
        return Ok(if k >= start { term(k) } else { 0.0 });
    }
    let mut sum = 0.0;
    let mut mon = TailMonitor::new();
    for it in 0..INNER_CAP as u64 {
        let t = term(start + it);
        sum += t;
        if mon.done(t.abs(), sum.abs()) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: what.to_string(),
        iterations: INNER_CAP,
        partial: sum,
    })
}

fn check_p0(p0: f64) -> Result<()> {
    if !(p0.abs() < 1.0) {
        return Err(Error::invalid("p0", "series require |p0| < 1"));
    }
    Ok(())
}

fn ceil_half(l: u32) -> u64 {
    (l as u64).div_ceil(2)
}

/// `C(−1/4, n) = (−1)^n (4n−3)!!!!/(4n)!!!!`.
fn quarter_binomial(n: u64) -> f64 {
    let mut r = 1.0;
    for k in 1..=n {
        r *= -(4.0 * k as f64 - 3.0) / (4.0 * k as f64);
    }
    r
}

/// Coefficient of `p̂₁^l` in A₁.
pub fn a1_coefficient(p0: f64, l: u32) -> Result<f64> {
    check_p0(p0)?;
    let exact = (p0 == 0.0).then(|| if l % 2 == 0 { l as u64 / 2 } else { u64::MAX });
    if exact == Some(u64::MAX) {
        return Ok(0.0);
    }
    tail_sum(ceil_half(l), exact, "A1 inner sum", |n| {
        quarter_binomial(n) * binomial(2 * n, l as u64) * pow(p0, 2 * n as i64 - l as i64)
    })
}

pub fn a1_terms(p0: f64, cap: u32) -> Result<Vec<SeriesTerm>> {
    let mut out = Vec::new();
    for l in 0..=cap {
        let c = a1_coefficient(p0, l)?;
        push(&mut out, Complex64::from(c), l, 0);
    }
    Ok(out)
}

fn push(out: &mut Vec<SeriesTerm>, c: Complex64, p: u32, q: u32) {
    if c != Complex64::new(0.0, 0.0) {
        out.push(SeriesTerm {
            coefficient: c,
            power_p: p,
            power_q: q,
        });
    }
}

/// `C(n+m−1, m)` with the `n = 0` row equal to `δ_{m0}`.
fn negative_binomial(n: u64, m: u64) -> f64 {
    if n == 0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    binomial(n + m - 1, m)
}

/// `Σ_m (−1)^m C(n+m−1, m) C(2m, l_p) p₀^{2m−l_p}`, the `p̂₁^{l_p}` coefficient of `(1+P²)^{−n}`.
fn inverse_power_coefficient(n: u64, p0: f64, lp: u32) -> Result<f64> {
    if n == 0 {
        return Ok(if lp == 0 { 1.0 } else { 0.0 });
    }
    let exact = (p0 == 0.0).then(|| if lp % 2 == 0 { lp as u64 / 2 } else { u64::MAX });
    if exact == Some(u64::MAX) {
        return Ok(0.0);
    }
    tail_sum(ceil_half(lp), exact, "inner m-sum", |m| {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sign * negative_binomial(n, m) * binomial(2 * m, lp as u64) * pow(p0, 2 * m as i64 - lp as i64)
    })
}

/// Coefficient of `q̂₁^{l_q} p̂₁^{l_p}` in A₂.
pub fn a2_coefficient(p0: f64, q0: f64, lp: u32, lq: u32) -> Result<f64> {
    check_p0(p0)?;
    let exact = (q0 == 0.0).then(|| if lq % 2 == 0 { lq as u64 / 2 } else { u64::MAX });
    if exact == Some(u64::MAX) {
        return Ok(0.0);
    }
    let mut err = None;
    let v = tail_sum(ceil_half(lq), exact, "A2 outer sum", |n| {
        let inner = match inverse_power_coefficient(n, p0, lp) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        };
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sign / factorial(n) * binomial(2 * n, lq as u64) * pow(q0, 2 * n as i64 - lq as i64) * inner
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

pub fn a2_terms(p0: f64, q0: f64, caps: Caps) -> Result<Vec<SeriesTerm>> {
    let mut out = Vec::new();
    for lq in 0..=caps.q {
        for lp in 0..=caps.p {
            let c = a2_coefficient(p0, q0, lp, lq)?;
            push(&mut out, Complex64::from(c), lp, lq);
        }
    }
    Ok(out)
}

fn factorial(n: u64) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `(∓i)^n / n!` for `n ≤ cap`.
pub fn b0_terms(sign: Sign, cap: u32) -> Vec<SeriesTerm> {
    let base = Complex64::new(0.0, -sign.value());
    let mut out = Vec::new();
    let mut c = Complex64::new(1.0, 0.0);
    for n in 0..=cap {
        if n > 0 {
            c = c * base / n as f64;
        }
        push(&mut out, c, n, 0);
    }
    out
}

/// Taylor coefficients of `arctan(p₀ + p̂₁)` in `p̂₁`, from the arctangent series.
pub fn arctan_coefficients(p0: f64, cap: u32) -> Result<Vec<f64>> {
    check_p0(p0)?;
    (0..=cap)
        .map(|l| {
            let lo = if l == 0 { 0 } else { (l as u64 - 1).div_ceil(2) };
            let exact = (p0 == 0.0).then(|| if l % 2 == 1 { (l as u64 - 1) / 2 } else { u64::MAX });
            if exact == Some(u64::MAX) {
                return Ok(0.0);
            }
            tail_sum(lo, exact, "arctan series", |m| {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign / (2 * m + 1) as f64
                    * binomial(2 * m + 1, l as u64)
                    * pow(p0, 2 * m as i64 + 1 - l as i64)
            })
        })
        .collect()
}

/// Coefficients of `exp(f)` from those of `f`, by `g_k = (1/k) Σ_j j f_j g_{k−j}`.
fn exp_series(f: &[Complex64]) -> Vec<Complex64> {
    let mut g = vec![Complex64::new(0.0, 0.0); f.len()];
    g[0] = f[0].exp();
    for k in 1..f.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=k {
            acc += f[j] * g[k - j] * j as f64;
        }
        g[k] = acc / k as f64;
    }
    g
}

pub fn b1_terms(sign: Sign, p0: f64, cap: u32) -> Result<Vec<SeriesTerm>> {
    let a = arctan_coefficients(p0, cap)?;
    let f: Vec<Complex64> = a
        .iter()
        .map(|&c| Complex64::new(0.0, 0.5 * sign.value() * c))
        .collect();
    let g = exp_series(&f);
    let mut out = Vec::new();
    for (l, c) in g.into_iter().enumerate() {
        push(&mut out, c, l as u32, 0);
    }
    Ok(out)
}

/// Coefficient of `q̂₁^{l_q} p̂₁^L` in B₂±.
pub fn b2_coefficient(sign: Sign, p0: f64, q0: f64, big_l: u32, lq: u32) -> Result<Complex64> {
    check_p0(p0)?;
    let exact = (q0 == 0.0).then(|| if lq % 2 == 0 { lq as u64 / 2 } else { u64::MAX });
    if exact == Some(u64::MAX) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut err = None;
    // The n-th outer term is (∓i)^n times a real number; sum the real factors
    // separately for each residue of n mod 4.
    let mut parts = [0.0f64; 4];
    let mut magnitude = |n: u64| -> f64 {
        // Σ_{l_p + j = L} [coefficient of p̂₁^{l_p} in (1+P²)^{−n}] · C(n, j) p₀^{n−j}
        let mut inner = 0.0;
        for j in 0..=big_l.min(n as u32) {
            let lp = big_l - j;
            let c = match inverse_power_coefficient(n, p0, lp) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            };
            inner += c * binomial(n, j as u64) * pow(p0, n as i64 - j as i64);
        }
        inner / factorial(n) * binomial(2 * n, lq as u64) * pow(q0, 2 * n as i64 - lq as i64)
    };
    let start = ceil_half(lq);
    match exact {
        Some(n) => {
            if n >= start {
                parts[(n % 4) as usize] += magnitude(n);
            }
        }
        None => {
            let mut mon = TailMonitor::new();
            let mut done = false;
            for it in 0..INNER_CAP as u64 {
                let n = start + it;
                let t = magnitude(n);
                parts[(n % 4) as usize] += t;
                let total: f64 = parts.iter().map(|x| x.abs()).sum();
                if mon.done(t.abs(), total) {
                    done = true;
                    break;
                }
            }
            if !done {
                return Err(Error::NonConvergence {
                    what: "B2 outer sum".into(),
                    iterations: INNER_CAP,
                    partial: parts.iter().sum(),
                });
            }
        }
    }
    if let Some(e) = err {
        return Err(e);
    }
    let base = Complex64::new(0.0, -sign.value());
    let mut out = Complex64::new(0.0, 0.0);
    for (r, v) in parts.iter().enumerate() {
        out += base.powu(r as u32) * *v;
    }
    Ok(out)
}

pub fn b2_terms(sign: Sign, p0: f64, q0: f64, caps: Caps) -> Result<Vec<SeriesTerm>> {
    let mut out = Vec::new();
    for lq in 0..=caps.q {
        for lp in 0..=caps.p {
            let c = b2_coefficient(sign, p0, q0, lp, lq)?;
            push(&mut out, c, lp, lq);
        }
    }
    Ok(out)
}

/// Term list of any function. `q0` is ignored by the single-variable ones.
pub fn terms(id: FunctionId, p0: f64, q0: f64, caps: Caps) -> Result<Vec<SeriesTerm>> {
    match id {
        FunctionId::A1 => a1_terms(p0, caps.p),
        FunctionId::A2 => a2_terms(p0, q0, caps),
        FunctionId::B0(s) => Ok(b0_terms(s, caps.p)),
        FunctionId::B1(s) => b1_terms(s, p0, caps.p),
        FunctionId::B2(s) => b2_terms(s, p0, q0, caps),
    }
}
