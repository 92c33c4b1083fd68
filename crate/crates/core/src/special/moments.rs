//! Fock-state moments `⟨n|(â+â†)^{2m}|n⟩`.
//!
//! Two independent exact routes are provided: the explicit finite sum over
//! intermediate occupations, and the product of a double factorial with the
//! terminating hypergeometric integer `₂F₁(1+n, −m; 1; 2)`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::hypergeometric::FockHypergeometric;
use crate::error::{Error, Result};

/// Which exact formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentRoute {
    /// `Σ_i (−½)^{m−i} (n+i)! (2m)! / (n! (m−i)! (i!)²)`.
    FiniteSum,
    /// `(−½)^m (2m)!/m! · ₂F₁(1+n, −m; 1; 2)`.
    Hypergeometric,
}

/// Exact moment as an integer.
pub fn fock_moment_exact(n: u64, m: u64, route: MomentRoute) -> BigInt {
    match route {
        MomentRoute::FiniteSum => finite_sum(n, m),
        MomentRoute::Hypergeometric => {
            let f = FockHypergeometric::new(n)
                .nth(m as usize)
                .expect("iterator is unbounded");
            let sign = if m % 2 == 0 { 1 } else { -1 };
            double_factorial_odd(m) * f * sign
        }
    }
}

/// `(2m−1)!! = (2m)!/(2^m m!)`.
fn double_factorial_odd(m: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 1..=m {
        acc *= 2 * k - 1;
    }
    acc
}

fn finite_sum(n: u64, m: u64) -> BigInt {
    // Multiply every summand by 2^m so that all of them are integers:
    // 2^m · term_i = (−1)^{m−i} 2^i · C(n+i, i) · (2m)!/((m−i)! i!).
    let mut fact_2m = BigInt::one();
    for k in 1..=2 * m {
        fact_2m *= k;
    }
    let mut total = BigInt::zero();
    let mut binom_ni = BigInt::one(); // C(n+i, i)
    let mut fact_i = BigInt::one();
    let mut fact_mi: Vec<BigInt> = Vec::with_capacity(m as usize + 1);
    let mut f = BigInt::one();
    fact_mi.push(f.clone());
    for k in 1..=m {
        f *= k;
        fact_mi.push(f.clone());
    }
    for i in 0..=m {
        if i > 0 {
            binom_ni = binom_ni * (n + i) / i;
            fact_i *= i;
        }
        let mut term = &binom_ni * &fact_2m / (&fact_mi[(m - i) as usize] * &fact_i);
        term <<= i as usize;
        if (m - i) % 2 == 1 {
            term = -term;
        }
        total += term;
    }
    let (q, r) = total.div_rem(&(BigInt::one() << m as usize));
    debug_assert!(r.is_zero(), "moment is not an integer");
    q
}

/// Moment as a double; an error when the value exceeds the double range.
pub fn fock_moment(n: u64, m: u64) -> Result<f64> {
    let v = fock_moment_exact(n, m, MomentRoute::Hypergeometric);
    match v.to_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(Error::invalid(
            "m",
            format!("⟨{n}|X^{}|{n}⟩ exceeds the double range; use ln_fock_moment", 2 * m),
        )),
    }
}

/// Natural logarithm of the moment, valid far beyond the double range.
pub fn ln_fock_moment(n: u64, m: u64) -> f64 {
    let v = fock_moment_exact(n, m, MomentRoute::Hypergeometric);
    debug_assert!(v.sign() == Sign::Plus);
    let bits = v.bits();
    let s = bits.saturating_sub(60);
    let top = (v.abs() >> s).to_f64().unwrap_or(f64::NAN);
    top.ln() + s as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(fock_moment(0, 1).unwrap(), 1.0);
        assert_eq!(fock_moment(1, 1).unwrap(), 3.0);
        assert_eq!(fock_moment(0, 2).unwrap(), 3.0);
        assert_eq!(fock_moment(5, 0).unwrap(), 1.0);
        // ⟨n|X⁴|n⟩ = 6n² + 6n + 3.
        for n in 0..20u64 {
            assert_eq!(fock_moment(n, 2).unwrap(), (6 * n * n + 6 * n + 3) as f64);
        }
    }

    #[test]
    fn routes_agree() {
        for n in 0..=30 {
            for m in 0..=30 {
                assert_eq!(
                    fock_moment_exact(n, m, MomentRoute::FiniteSum),
                    fock_moment_exact(n, m, MomentRoute::Hypergeometric),
                    "n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn log_domain_for_large_arguments() {
        assert!(fock_moment(20000, 200).is_err());
        let l = ln_fock_moment(20000, 200);
        assert!(l.is_finite() && l > 700.0);
        let small = ln_fock_moment(3, 4);
        assert!((small - fock_moment(3, 4).unwrap().ln()).abs() < 1e-13);
    }
}
