//! Matrix routes used to validate the analytic gate model: explicit
//! evolution on qubit ⊗ Fock space, and the Debye–Waller displacement norm.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::thermal::ThermalState;
use crate::error::{Error, Result};
use crate::expansion::{ladder_monomial_matrix, FockSpace};
use crate::special::hermite_all;

/// Largest qubit ⊗ Fock dimension the oracle accepts.
pub const ORACLE_MAX_DIM: usize = 4096;

/// Which couplings the oracle keeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OracleFrame {
    /// Only Fock-diagonal couplings (the resonance rule).
    RotatingWave,
    /// All couplings, with the mode energy `ω a†a` in units of `Ω₀`.
    Full { mode_frequency_ratio: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleParams {
    pub eta: f64,
    pub xi: f64,
    /// Pulse area `Ω₀t`.
    pub omega_t: f64,
    /// Fock cutoff of the simulated space.
    pub n_max: usize,
    /// Highest power of `X` kept in the coupling series.
    pub order_cap: usize,
    pub frame: OracleFrame,
}

/// Coupling operator `Σ_{l≤L} (−η)^l H_l(ξ)/l! · X^l` on the truncated space.
pub fn coupling_operator(eta: f64, xi: f64, n_max: usize, order_cap: usize) -> Result<DMatrix<f64>> {
    let space = FockSpace::new(n_max)?;
    let h = hermite_all(order_cap, xi);
    let dim = space.dim();
    let mut f = DMatrix::zeros(dim, dim);
    let mut c = 1.0;
    for (l, hl) in h.iter().enumerate() {
        if l > 0 {
            c *= -eta / l as f64;
        }
        if c == 0.0 && l > 0 {
            break;
        }
        let xl = ladder_monomial_matrix(l, space)?;
        f += xl * (c * hl);
    }
    Ok(f)
}

/// Bright-state probability after one pulse from `|↓, n⟩`, for every `n ≤ n_max`.
///
/// Builds `H/ħ = Ω₀ F ⊗ σ_x (+ ω a†a ⊗ I)`, splits it into connected blocks
/// and exponentiates each block through its eigen-decomposition.
pub fn brute_force_evolve(p: &OracleParams) -> Result<Vec<f64>> {
    let dim = p.n_max + 1;
    if 2 * dim > ORACLE_MAX_DIM {
        return Err(Error::invalid(
            "n_max",
            format!("oracle dimension {} exceeds {ORACLE_MAX_DIM}", 2 * dim),
        ));
    }
    if p.order_cap >= dim {
        return Err(Error::CutoffOverflow {
            power: p.order_cap,
            dim,
        });
    }
    let f = coupling_operator(p.eta, p.xi, p.n_max, p.order_cap)?;
    // Basis index: 2n + s, s = 0 for ↓ and 1 for ↑.
    let mut h = DMatrix::zeros(2 * dim, 2 * dim);
    for m in 0..dim {
        for n in 0..dim {
            let keep = match p.frame {
                OracleFrame::RotatingWave => m == n,
                OracleFrame::Full { .. } => true,
            };
            if keep && f[(m, n)] != 0.0 {
                h[(2 * m + 1, 2 * n)] = f[(m, n)];
                h[(2 * m, 2 * n + 1)] = f[(m, n)];
            }
        }
        if let OracleFrame::Full { mode_frequency_ratio } = p.frame {
            h[(2 * m, 2 * m)] = mode_frequency_ratio * m as f64;
            h[(2 * m + 1, 2 * m + 1)] = mode_frequency_ratio * m as f64;
        }
    }
    let blocks = connected_blocks(&h);
    let mut out = vec![0.0; dim];
    for block in blocks {
        let k = block.len();
        let sub = DMatrix::from_fn(k, k, |i, j| h[(block[i], block[j])]);
        let eig = SymmetricEigen::new(sub);
        // U = V exp(−i Λ Ω₀t) Vᵀ.
        let phases: Vec<Complex64> = eig
            .eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -l * p.omega_t))
            .collect();
        for (col, &start) in block.iter().enumerate() {
            if start % 2 != 0 {
                continue;
            }
            let n = start / 2;
            let mut bright = 0.0;
            for (row, &target) in block.iter().enumerate() {
                if target % 2 != 1 {
                    continue;
                }
                let mut amp = Complex64::default();
                for j in 0..k {
                    amp += phases[j] * eig.eigenvectors[(row, j)] * eig.eigenvectors[(col, j)];
                }
                bright += amp.norm_sqr();
            }
            out[n] = bright;
        }
    }
    Ok(out)
}

/// Index sets of the connected components of the nonzero pattern, each sorted.
fn connected_blocks(h: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = h.nrows();
    let adjacency: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| h[(i, j)] != 0.0 || h[(j, i)] != 0.0).collect())
        .collect();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        seen[s] = true;
        let mut comp = Vec::new();
        while let Some(i) = stack.pop() {
            comp.push(i);
            for &j in &adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// `e^{iκX}` restricted to `|0⟩…|n_max⟩`, computed on a space padded by `pad` levels.
fn displacement_block(kappa: f64, n_max: usize, pad: usize) -> DMatrix<Complex64> {
    let big = n_max + 1 + pad;
    let x = crate::expansion::position_matrix(big);
    let eig = SymmetricEigen::new(x);
    let d = n_max + 1;
    DMatrix::from_fn(d, d, |i, j| {
        let mut s = Complex64::default();
        for k in 0..big {
            s += Complex64::from_polar(1.0, kappa * eig.eigenvalues[k])
                * eig.eigenvectors[(i, k)]
                * eig.eigenvectors[(j, k)];
        }
        s
    })
}

/// Outcome of the Debye–Waller norm evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DebyeWaller {
    /// `‖P(e^{iκX} − 1)P‖` on `n ≤ n_max`.
    pub norm: f64,
    /// Padding that reached agreement with its doubled value.
    pub padding: usize,
}

/// Spectral norm of `e^{iκX} − 1` on `|0⟩…|n_max⟩`, with the padding doubled until stable.
pub fn debye_waller_norm(kappa: f64, n_max: usize) -> Result<DebyeWaller> {
    if !kappa.is_finite() {
        return Err(Error::invalid("kappa", "must be finite"));
    }
    if kappa == 0.0 {
        return Ok(DebyeWaller { norm: 0.0, padding: 0 });
    }
    let eval = |pad: usize| -> f64 {
        let mut m = displacement_block(kappa, n_max, pad);
        for i in 0..=n_max {
            m[(i, i)] -= Complex64::from(1.0);
        }
        m.singular_values().iter().cloned().fold(0.0, f64::max)
    };
    let mut pad = 16 + (4.0 * kappa.abs() * ((n_max + 1) as f64).sqrt()).ceil() as usize;
    let mut prev = eval(pad);
    while pad <= 4 * ORACLE_MAX_DIM {
        let next = eval(2 * pad);
        if (next - prev).abs() <= 1e-10 * next.max(1e-300) {
            return Ok(DebyeWaller { norm: next, padding: pad });
        }
        prev = next;
        pad *= 2;
    }
    Err(Error::NonConvergence {
        what: "Debye–Waller norm padding".into(),
        iterations: pad,
        partial: prev,
    })
}

/// `⟨n|e^{iκX}|n⟩ = e^{−κ²/2} L_n(κ²)`.
pub fn displacement_diagonal(kappa: f64, n: usize) -> f64 {
    let x = kappa * kappa;
    let (mut l0, mut l1) = (1.0, 1.0 - x);
    if n == 0 {
        return (-x / 2.0).exp();
    }
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 - x) * l1 - kf * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    (-x / 2.0).exp() * l1
}

/// Thermal Rabi-rate suppression `1 − Σ_n w_n e^{−κ²/2} L_n(κ²)`.
pub fn thermal_debye_waller_suppression(kappa: f64, state: &ThermalState) -> f64 {
    let w = state.weights();
    let s: f64 = w
        .iter()
        .enumerate()
        .map(|(n, wn)| wn * displacement_diagonal(kappa, n))
        .sum();
    1.0 - s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::theta_n_aligned;

    #[test]
    fn no_coupling_gives_bare_rabi() {
        let p = OracleParams {
            eta: 0.0,
            xi: 0.3,
            omega_t: 1.1,
            n_max: 20,
            order_cap: 8,
            frame: OracleFrame::RotatingWave,
        };
        for v in brute_force_evolve(&p).unwrap() {
            assert!((v - 1.1f64.sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn rotating_wave_matches_closed_form() {
        let p = OracleParams {
            eta: 0.05,
            xi: 0.0,
            omega_t: std::f64::consts::FRAC_PI_2,
            n_max: 60,
            order_cap: 40,
            frame: OracleFrame::RotatingWave,
        };
        let v = brute_force_evolve(&p).unwrap();
        for n in 0..=50 {
            let e = theta_n_aligned(n as u64, 0.05, p.omega_t).sin().powi(2);
            assert!((v[n] - e).abs() < 1e-8, "n={n}");
        }
    }

    #[test]
    fn full_frame_approaches_rotating_wave_for_fast_modes() {
        let base = OracleParams {
            eta: 0.05,
            xi: 0.2,
            omega_t: 1.3,
            n_max: 30,
            order_cap: 20,
            frame: OracleFrame::RotatingWave,
        };
        let rwa = brute_force_evolve(&base).unwrap();
        let full = brute_force_evolve(&OracleParams {
            frame: OracleFrame::Full { mode_frequency_ratio: 2000.0 },
            ..base
        })
        .unwrap();
        for n in 0..=5 {
            assert!((rwa[n] - full[n]).abs() < 1e-3, "n={n}: {} vs {}", rwa[n], full[n]);
        }
    }

    #[test]
    fn debye_waller_examples() {
        assert_eq!(debye_waller_norm(0.0, 10).unwrap().norm, 0.0);
        let d = debye_waller_norm(0.12, 2).unwrap();
        // ⟨0|e^{iκX}|0⟩ bounds the norm from below.
        assert!(d.norm >= 1.0 - displacement_diagonal(0.12, 0) - 1e-12);
        let small = debye_waller_norm(1e-3, 10).unwrap().norm;
        assert!(small < 1e-2);
    }

    #[test]
    fn laguerre_diagonal_matches_matrix() {
        let m = displacement_block(0.3, 6, 40);
        for n in 0..=6 {
            assert!((m[(n, n)].re - displacement_diagonal(0.3, n)).abs() < 1e-12);
            assert!(m[(n, n)].im.abs() < 1e-12);
        }
    }
}
