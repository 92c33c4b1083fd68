//! Matrices of `X = â + â†` on a truncated Fock space and their spectral norms.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-mode space spanned by `|0⟩ … |n_max⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockSpace {
    pub n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::invalid("n_max", "must be at least 1"));
        }
        Ok(Self { n_max })
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }
}

/// Tridiagonal `X` on `dim` levels.
pub fn position_matrix(dim: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        let v = (n as f64).sqrt();
        x[(n - 1, n)] = v;
        x[(n, n - 1)] = v;
    }
    x
}

/// `⟨m|Xᵏ|n⟩` for `m, n ≤ n_max`.
///
/// Entries are those of the untruncated operator: each column is built by `k`
/// applications of `X` on a space padded by `k` levels, so no amplitude is
/// lost at the cutoff.
pub fn ladder_monomial_matrix(k: usize, space: FockSpace) -> Result<DMatrix<f64>> {
    let dim = space.dim();
    if k >= dim {
        return Err(Error::CutoffOverflow { power: k, dim });
    }
    let padded = dim + k;
    let mut out = DMatrix::zeros(dim, dim);
    let mut v = vec![0.0; padded];
    let mut w = vec![0.0; padded];
    for n in 0..dim {
        v.iter_mut().for_each(|x| *x = 0.0);
        v[n] = 1.0;
        // Nonzero support after j steps is [n−j, n+j].
        for j in 0..k {
            let lo = n.saturating_sub(j + 1);
            let hi = (n + j + 1).min(padded - 1);
            for i in lo..=hi {
                let mut s = 0.0;
                if i > 0 {
                    s += (i as f64).sqrt() * v[i - 1];
                }
                if i + 1 < padded {
                    s += ((i + 1) as f64).sqrt() * v[i + 1];
                }
                w[i] = s;
            }
            std::mem::swap(&mut v, &mut w);
            w.iter_mut().for_each(|x| *x = 0.0);
        }
        for m in 0..dim {
            out[(m, n)] = v[m];
        }
    }
    Ok(out)
}

/// Number of eigenvalues of the symmetric tridiagonal matrix with zero
/// diagonal and off-diagonal `off` that are smaller than `x` (Sturm count).
fn sturm_count(off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = -x;
    if d < 0.0 {
        count += 1;
    }
    for &b in off {
        let prev = if d == 0.0 { f64::EPSILON * (b.abs() + 1.0) } else { d };
        d = -x - b * b / prev;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of a zero-diagonal symmetric tridiagonal matrix, by bisection.
pub fn tridiagonal_max_eigenvalue(off: &[f64]) -> f64 {
    let n = off.len() + 1;
    if n == 1 {
        return 0.0;
    }
    // Gershgorin bound.
    let mut hi: f64 = 0.0;
    for i in 0..n {
        let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let r = if i < n - 1 { off[i].abs() } else { 0.0 };
        hi = hi.max(l + r);
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(off, mid) >= n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Spectral norm of `X` truncated to `dim` levels: `√2` times the largest zero of `H_dim`.
pub fn truncated_position_norm(dim: usize) -> f64 {
    let off: Vec<f64> = (1..dim).map(|n| (n as f64).sqrt()).collect();
    tridiagonal_max_eigenvalue(&off)
}
