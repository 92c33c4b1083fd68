//! The reduced single-qubit gate: Rabi rate and phase from the beam geometry,
//! the axial coupling parameters, Fock-resolved rotation angles, thermal
//! averages, composite sequences and matrix oracles.

pub mod oracle;
pub mod pulses;
pub mod thermal;
pub mod theta;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::beam_optics::{Axis, BeamGeometry};
use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::modes::{zero_point_spread, CouplingParams, ModeProjections};

pub use oracle::{
    brute_force_evolve, debye_waller_norm, displacement_diagonal, thermal_debye_waller_suppression, DebyeWaller,
    OracleFrame, OracleParams,
};
pub use pulses::{
    gate_block, sequence_p_up, sequence_unitary, sk1_phase, unitarity_error, PhaseErrorModel, Pulse, PulseSequence,
    SequenceErrors,
};
pub use thermal::{p_up_derivatives, p_up_table, thermal_cutoff, ThermalState, DEFAULT_TAIL};
pub use theta::{theta_n, theta_n_aligned, theta_n_series, SeriesOptions, ThetaSeries, ThetaTable};

/// Relative orientation of the two Raman beams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateGeometry {
    CoPropagating,
    CounterPropagating,
}

/// Single-mode description of one gate pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveGate {
    /// Rabi rate, rad/s.
    pub omega0: f64,
    /// Drive phase, rad.
    pub psi0: f64,
    pub eta: f64,
    pub xi: f64,
    /// Pulse duration, s.
    pub duration: f64,
    /// Two-photon detuning, rad/s.
    pub detuning: f64,
    pub geometry: GateGeometry,
}

impl EffectiveGate {
    pub fn new(omega0: f64, psi0: f64, eta: f64, xi: f64, duration: f64, geometry: GateGeometry) -> Result<Self> {
        if !(omega0 >= 0.0 && omega0.is_finite()) {
            return Err(Error::invalid("omega0", "must be finite and non-negative"));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::invalid("duration", "must be positive"));
        }
        if !(eta >= 0.0 && eta.is_finite()) || !xi.is_finite() {
            return Err(Error::invalid("eta/xi", "eta must be non-negative, both finite"));
        }
        Ok(Self {
            omega0,
            psi0,
            eta,
            xi,
            duration,
            detuning: 0.0,
            geometry,
        })
    }

    /// Pulse area `Ω₀t`.
    pub fn area(&self) -> f64 {
        self.omega0 * self.duration
    }

    /// `Θ_n` for this gate.
    pub fn theta(&self, n: u64) -> Result<f64> {
        if self.xi == 0.0 {
            Ok(theta_n_aligned(n, self.eta, self.area()))
        } else {
            theta_n(n, self.eta, self.xi, self.area())
        }
    }

    /// 2×2 block at Fock level `n`.
    pub fn block(&self, n: u64) -> Result<nalgebra::Matrix2<num_complex::Complex64>> {
        Ok(gate_block(self.theta(n)?, self.psi0))
    }
}

/// Thermally averaged bright population after one pulse of `gate`.
pub fn p_up(state: &ThermalState, gate: &EffectiveGate) -> Result<f64> {
    let table = ThetaTable::new(state.n_max, gate.eta, gate.xi)?;
    p_up_table(state, &table, gate.area())
}

/// `Ω₀` and `Ψ₀` of the beam pair. `dipole` is the effective two-photon
/// dipole constant `D̄`, J·m² per W·(1/m²) so that `D̄ E₁E₂/ħ` is a rate.
pub fn omega0_psi0(beams: &[BeamGeometry; 2], coupling: &CouplingParams, dipole: f64) -> Result<(f64, f64)> {
    for b in beams {
        b.validate()?;
    }
    let mut waists = 1.0;
    let mut defocus = 1.0;
    let mut gauss = 0.0;
    let mut gouy = 0.0;
    let mut curvature = 0.0;
    for (beam, c) in beams.iter().zip(coupling.beams.iter()) {
        for axis in Axis::BOTH {
            let l = c.lambda0(axis);
            if l.abs() >= crate::modes::LAMBDA0_LIMIT {
                return Err(Error::invalid("lambda0", "outside the Rayleigh-range regime"));
            }
            let g = c.gamma0(axis);
            let d = 1.0 + l * l;
            waists *= beam.waist(axis);
            defocus *= d;
            gauss -= g * g / d;
            gouy += 0.5 * l.atan();
            curvature -= l * g * g / d;
        }
    }
    let omega0 =
        dipole / (PI * HBAR) * (beams[0].power * beams[1].power / waists).sqrt() * defocus.powf(-0.25) * gauss.exp();
    let psi0 = beams[0].phase0 - beams[1].phase0 + beams[1].wavevector() * coupling.beams[1].y_eq
        - beams[0].wavevector() * coupling.beams[0].y_eq
        + gouy
        + curvature;
    Ok((omega0, psi0))
}

/// Waist of the combined axial intensity profile.
pub fn effective_waist(geometry: GateGeometry, beams: &[BeamGeometry; 2]) -> f64 {
    let (w1, w2) = (beams[0].waist_x, beams[1].waist_x);
    match geometry {
        GateGeometry::CoPropagating => 1.0 / (1.0 / (w1 * w1) + 1.0 / (w2 * w2)).sqrt(),
        GateGeometry::CounterPropagating => w1.min(w2),
    }
}

/// `(η, ξ)` for axial mode `mode`.
///
/// `x0` is the axial offset of the ion from the beam centre and `defocus` its
/// distance from the `x` focus along the beam. The Rayleigh range is that of
/// the effective waist at the first beam's wavelength.
pub fn eta_xi(
    geometry: GateGeometry,
    beams: &[BeamGeometry; 2],
    modes: &ModeProjections,
    mode: usize,
    x0: f64,
    defocus: f64,
) -> Result<(f64, f64)> {
    let m = modes
        .modes
        .get(mode)
        .ok_or_else(|| Error::invalid("mode", format!("index {mode} out of range")))?;
    let zeta = zero_point_spread(modes.mass, m.frequency)?;
    let w = effective_waist(geometry, beams);
    let yr = PI * w * w / beams[0].wavelength;
    let denom = w * (1.0 + (defocus / yr).powi(2)).sqrt();
    Ok((zeta * m.nu[0].abs() / denom, x0 / denom))
}
