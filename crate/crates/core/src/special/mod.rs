//! Special functions and exact arithmetic used by the expansions and the
//! Rabi-angle series.

pub mod bigfloat;
pub mod hermite;
pub mod hypergeometric;
pub mod moments;

pub use bigfloat::BigFloat;
pub use hermite::{hermite, hermite_all};
pub use hypergeometric::{half_hypergeometric_table, FockHypergeometric};
pub use moments::{fock_moment, fock_moment_exact, ln_fock_moment, MomentRoute};

/// Binomial coefficient as a double; exact for arguments up to ~50.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    if acc < 9.0e15 {
        acc.round()
    } else {
        acc
    }
}

/// Pairwise (cascade) summation with a fixed split pattern.
///
/// The result depends only on the input order, never on scheduling, which is
/// what makes threaded sweeps reproduce single-threaded output bit for bit.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
