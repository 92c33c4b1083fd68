//! Terminating Gauss hypergeometric functions that appear in the
//! Fock-diagonal Rabi angles.
//!
//! * `F_m(n) = ₂F₁(1+n, −m; 1; 2)` is an integer for all `n, m`. It is produced
//!   exactly by a three-term recurrence in `m`.
//! * `G_n(z) = ₂F₁(½, −n; 1; z)` is a polynomial in `z` of degree `n`. For
//!   `0 ≤ z < 1` the forward recurrence in `n` is stable, while the explicit
//!   sum loses all digits to cancellation once `n` reaches the thousands.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Iterator over `F_0(n), F_1(n), …` in exact integer arithmetic.
///
/// Uses `(m+1) F_{m+1} = m F_{m−1} − (2n+1) F_m`, whose division is exact.
#[derive(Debug, Clone)]
pub struct FockHypergeometric {
    n2p1: BigInt,
    m: u64,
    prev: BigInt,
    cur: BigInt,
}

impl FockHypergeometric {
    pub fn new(n: u64) -> Self {
        Self {
            n2p1: BigInt::from(2 * n + 1),
            m: 0,
            prev: BigInt::zero(),
            cur: BigInt::one(),
        }
    }
}

impl Iterator for FockHypergeometric {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let out = self.cur.clone();
        let m = BigInt::from(self.m);
        let num = &m * &self.prev - &self.n2p1 * &self.cur;
        let (q, r) = num.div_rem(&BigInt::from(self.m + 1));
        debug_assert!(r.is_zero(), "non-integral hypergeometric recurrence step");
        self.prev = std::mem::replace(&mut self.cur, q);
        self.m += 1;
        Some(out)
    }
}

/// `₂F₁(1+n, −m; 1; 2)` by the explicit finite sum `Σ_k (−2)^k C(m,k) C(n+k,k)`.
pub fn fock_hypergeometric_direct(n: u64, m: u64) -> BigInt {
    let mut total = BigInt::zero();
    let mut binom_m = BigInt::one(); // C(m, k)
    let mut binom_nk = BigInt::one(); // C(n+k, k)
    let mut pow = BigInt::one(); // (−2)^k
    for k in 0..=m {
        total += &pow * &binom_m * &binom_nk;
        if k == m {
            break;
        }
        binom_m = binom_m * BigInt::from(m - k) / BigInt::from(k + 1);
        binom_nk = binom_nk * BigInt::from(n + k + 1) / BigInt::from(k + 1);
        pow *= -2;
    }
    total
}

/// `G_0(z), …, G_{n_max}(z)` with `G_n = ₂F₁(½, −n; 1; z)`.
pub fn half_hypergeometric_table(n_max: usize, z: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    let a = 1.0 - 0.5 * z;
    let b = 1.0 - z;
    out.push(a);
    for n in 1..n_max {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0) * a * out[n] - nf * b * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

/// `₂F₁(½, −n; 1; z)` by the terminating sum. Only usable for small `n`.
pub fn half_hypergeometric_direct(n: usize, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        let kf = k as f64;
        term *= (0.5 + kf) * (kf - n as f64) / ((kf + 1.0) * (kf + 1.0)) * z;
        sum += term;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_matches_direct_sum() {
        for n in [0u64, 1, 2, 7, 50, 2000] {
            let seq: Vec<BigInt> = FockHypergeometric::new(n).take(40).collect();
            for (m, v) in seq.iter().enumerate() {
                assert_eq!(*v, fock_hypergeometric_direct(n, m as u64), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn first_values() {
        let seq: Vec<BigInt> = FockHypergeometric::new(3).take(3).collect();
        assert_eq!(seq[0], BigInt::from(1));
        assert_eq!(seq[1], BigInt::from(-7));
    }

    #[test]
    fn half_table_matches_direct_for_small_n() {
        for &z in &[0.0, 1e-4, 0.0392, 0.3, 0.9] {
            let t = half_hypergeometric_table(200, z);
            for n in 0..=200 {
                // The explicit sum cancels for larger z.
                if (z > 0.1 && n > 40) || (z > 0.5 && n > 10) {
                    continue;
                }
                let d = half_hypergeometric_direct(n, z);
                assert!((t[n] - d).abs() <= 1e-12 * d.abs().max(1e-3), "z={z} n={n}: {} vs {d}", t[n]);
            }
        }
    }

    #[test]
    fn half_table_high_precision_values() {
        // 50-digit reference evaluations.
        for &(z, n, v) in &[
            (0.3, 98, 0.1045591843655437),
            (0.3, 200, 0.073006779348151495),
            (0.9, 150, 0.048526282527125005),
            (0.9, 200, 0.042031789562291641),
        ] {
            let t = half_hypergeometric_table(n, z);
            assert!((t[n] - v).abs() < 1e-13 * v, "z={z} n={n}: {}", t[n]);
        }
    }

    #[test]
    fn half_table_at_zero_argument() {
        assert!(half_hypergeometric_table(50, 0.0).iter().all(|&v| v == 1.0));
    }
}
