//! Single-qubit rotations at fixed Fock level and composite pulse sequences.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::thermal::{thermal_sum, ThermalState};
use super::theta::ThetaTable;
use crate::error::{Error, Result};

/// `cos Θ · I − i sin Θ · (cos Ψ σ_x + sin Ψ σ_y)` in the basis `(|↓⟩, |↑⟩)`.
pub fn gate_block(theta: f64, psi: f64) -> Matrix2<Complex64> {
    let (s, c) = theta.sin_cos();
    let off_lo = Complex64::new(0.0, -s) * Complex64::from_polar(1.0, psi);
    let off_hi = Complex64::new(0.0, -s) * Complex64::from_polar(1.0, -psi);
    Matrix2::new(Complex64::from(c), off_hi, off_lo, Complex64::from(c))
}

/// Largest deviation of `U†U` from the identity.
pub fn unitarity_error(u: &Matrix2<Complex64>) -> f64 {
    let g = u.adjoint() * u;
    let mut e: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { 1.0 } else { 0.0 };
            e = e.max((g[(i, j)] - Complex64::from(id)).norm());
        }
    }
    e
}

/// Nominal rotation by `angle` about the equatorial axis at azimuth `phase`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub angle: f64,
    pub phase: f64,
}

/// Pulses in time order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub pulses: Vec<Pulse>,
}

/// SK1 correction phase `arccos(−1/4)`.
pub fn sk1_phase() -> f64 {
    (-0.25f64).acos()
}

impl PulseSequence {
    pub fn new(pulses: Vec<Pulse>) -> Result<Self> {
        if pulses.is_empty() {
            return Err(Error::invalid("sequence", "must contain at least one pulse"));
        }
        if pulses.iter().any(|p| !(p.angle >= 0.0 && p.angle.is_finite() && p.phase.is_finite())) {
            return Err(Error::invalid("sequence", "angles must be finite and non-negative"));
        }
        Ok(Self { pulses })
    }

    /// A bare π pulse.
    pub fn single() -> Self {
        Self {
            pulses: vec![Pulse { angle: PI, phase: 0.0 }],
        }
    }

    /// `R(2π, −ψ) R(2π, ψ) R(π, 0)`: the π pulse runs first.
    pub fn sk1() -> Self {
        let psi = sk1_phase();
        Self {
            pulses: vec![
                Pulse { angle: PI, phase: 0.0 },
                Pulse { angle: 2.0 * PI, phase: psi },
                Pulse { angle: 2.0 * PI, phase: -psi },
            ],
        }
    }

    /// `R(π, 2π/3) R(π, 4π/3) R(π, 2π/3)`.
    pub fn tycko() -> Self {
        let a = 2.0 * PI / 3.0;
        Self {
            pulses: vec![
                Pulse { angle: PI, phase: a },
                Pulse { angle: PI, phase: 2.0 * a },
                Pulse { angle: PI, phase: a },
            ],
        }
    }
}

/// How a systematic phase error enters the `k`-th gate (0-indexed, time order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseErrorModel {
    /// `φ_k + k·δφ`.
    Progressive,
    /// `φ_k + δφ` on every gate.
    Constant,
}

/// Error model applied when a sequence is executed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceErrors {
    pub phase_error: f64,
    pub phase_model: PhaseErrorModel,
    /// Fractional error of every pulse area.
    pub amplitude_error: f64,
}

impl Default for SequenceErrors {
    fn default() -> Self {
        Self {
            phase_error: 0.0,
            phase_model: PhaseErrorModel::Progressive,
            amplitude_error: 0.0,
        }
    }
}

impl SequenceErrors {
    fn phase_offset(&self, k: usize) -> f64 {
        match self.phase_model {
            PhaseErrorModel::Progressive => k as f64 * self.phase_error,
            PhaseErrorModel::Constant => self.phase_error,
        }
    }
}

/// Product of the sequence at one Fock level; `theta_pi` is the realised
/// half-angle of the calibrated π pulse at that level.
pub fn sequence_unitary(seq: &PulseSequence, theta_pi: f64, errors: &SequenceErrors) -> Matrix2<Complex64> {
    let mut u = Matrix2::identity();
    for (k, p) in seq.pulses.iter().enumerate() {
        let half = (p.angle / PI) * theta_pi * (1.0 + errors.amplitude_error);
        u = gate_block(half, p.phase + errors.phase_offset(k)) * u;
    }
    u
}

/// Thermally averaged `|⟨↑|U_n|↓⟩|²` with every pulse timed from the
/// calibrated π-pulse area `omega_t_pi`.
pub fn sequence_p_up(
    seq: &PulseSequence,
    state: &ThermalState,
    table: &ThetaTable,
    omega_t_pi: f64,
    errors: &SequenceErrors,
) -> Result<f64> {
    if seq.pulses.is_empty() {
        return Err(Error::invalid("sequence", "must contain at least one pulse"));
    }
    if table.len() <= state.n_max {
        return Err(Error::invalid("theta table", "does not cover the thermal cutoff"));
    }
    Ok(thermal_sum(state, |n, w| {
        let u = sequence_unitary(seq, omega_t_pi * table.factor(n), errors);
        w * u[(1, 0)].norm_sqr()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn block_examples() {
        let id = gate_block(0.0, 0.7);
        assert_eq!(id, Matrix2::identity());
        let x = gate_block(FRAC_PI_2, 0.0);
        assert!((x[(1, 0)] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!(x[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn same_axis_rotations_add() {
        let a = gate_block(0.3, 1.1) * gate_block(0.9, 1.1);
        let b = gate_block(1.2, 1.1);
        assert!((a - b).norm() < 1e-14);
        assert!(unitarity_error(&a) < 1e-14);
    }

    #[test]
    fn perfect_sequences_invert() {
        let none = SequenceErrors::default();
        for seq in [PulseSequence::single(), PulseSequence::sk1(), PulseSequence::tycko()] {
            let u = sequence_unitary(&seq, FRAC_PI_2, &none);
            assert!((u[(1, 0)].norm_sqr() - 1.0).abs() < 1e-14);
            assert!(unitarity_error(&u) < 1e-12);
        }
        assert!((sk1_phase() - 1.8235).abs() < 1e-4);
    }

    #[test]
    fn bare_amplitude_error() {
        let d = 0.02;
        let e = SequenceErrors {
            amplitude_error: d,
            ..Default::default()
        };
        let p = sequence_unitary(&PulseSequence::single(), FRAC_PI_2, &e)[(1, 0)].norm_sqr();
        assert!((p - (PI * d / 2.0).cos().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn empty_sequence_rejected() {
        assert!(PulseSequence::new(vec![]).is_err());
    }
}
