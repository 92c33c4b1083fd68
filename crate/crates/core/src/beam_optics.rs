//! Elliptical Gaussian beams with simple astigmatism.
//!
//! A beam propagates along its local `y` axis. The two principal axes of the
//! spot ellipse are `x` (tight, along the ion chain) and `z` (loose). Each axis
//! has its own waist and focal position, so the wavefront and spot size are
//! evaluated per axis.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Principal transverse axis of the spot ellipse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Z,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Z];

    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Z => "z",
        }
    }
}

/// One Raman beam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamGeometry {
    /// Optical power, W.
    pub power: f64,
    /// Vacuum wavelength, m.
    pub wavelength: f64,
    /// Waist radius along `x` at its focus, m.
    pub waist_x: f64,
    /// Waist radius along `z` at its focus, m.
    pub waist_z: f64,
    /// Focal position of the `x` principal axis along `y`, m.
    pub focal_y_x: f64,
    /// Focal position of the `z` principal axis along `y`, m.
    pub focal_y_z: f64,
    /// Constant optical phase, rad.
    pub phase0: f64,
    /// +1 or -1 along the shared lab axis.
    pub propagation_sign: i8,
}

/// A point in a beam's own frame, m.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BeamFramePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BeamFramePoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

impl BeamGeometry {
    /// A beam focused at `y = 0` with zero phase.
    pub fn focused(power: f64, wavelength: f64, waist_x: f64, waist_z: f64) -> Self {
        Self {
            power,
            wavelength,
            waist_x,
            waist_z,
            focal_y_x: 0.0,
            focal_y_z: 0.0,
            phase0: 0.0,
            propagation_sign: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("power", self.power),
            ("wavelength", self.wavelength),
            ("waist_x", self.waist_x),
            ("waist_z", self.waist_z),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [
            ("focal_y_x", self.focal_y_x),
            ("focal_y_z", self.focal_y_z),
            ("phase0", self.phase0),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if self.propagation_sign != 1 && self.propagation_sign != -1 {
            return Err(Error::invalid("propagation_sign", "must be +1 or -1"));
        }
        Ok(())
    }

    /// Wavevector magnitude 2π/λ, 1/m.
    pub fn wavevector(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn waist(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.waist_x,
            Axis::Z => self.waist_z,
        }
    }

    pub fn focal_y(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.focal_y_x,
            Axis::Z => self.focal_y_z,
        }
    }

    /// Rayleigh range π w²/λ of one principal axis, m.
    pub fn rayleigh_range(&self, axis: Axis) -> f64 {
        let w = self.waist(axis);
        PI * w * w / self.wavelength
    }

    /// Spot radius along `axis` at position `y`.
    pub fn spot_size(&self, axis: Axis, y: f64) -> f64 {
        let u = (y - self.focal_y(axis)) / self.rayleigh_range(axis);
        self.waist(axis) * (1.0 + u * u).sqrt()
    }

    /// Inverse radius of curvature of the wavefront along `axis`, 1/m.
    ///
    /// Zero at the focus, where the radius itself diverges.
    pub fn inverse_radius_of_curvature(&self, axis: Axis, y: f64) -> f64 {
        let d = y - self.focal_y(axis);
        let yr = self.rayleigh_range(axis);
        d / (d * d + yr * yr)
    }

    /// Gouy phase, averaged over the two principal axes.
    pub fn gouy_phase(&self, y: f64) -> f64 {
        let ax = ((y - self.focal_y_x) / self.rayleigh_range(Axis::X)).atan();
        let az = ((y - self.focal_y_z) / self.rayleigh_range(Axis::Z)).atan();
        0.5 * (ax + az)
    }

    /// Field amplitude and phase at `p`.
    ///
    /// The amplitude is normalised so that its square integrates to P/2 over
    /// any transverse plane.
    pub fn field_at(&self, p: BeamFramePoint) -> (f64, f64) {
        let wx = self.spot_size(Axis::X, p.y);
        let wz = self.spot_size(Axis::Z, p.y);
        let amp = (self.power / (PI * wx * wz)).sqrt()
            * (-(p.x * p.x) / (wx * wx) - (p.z * p.z) / (wz * wz)).exp();
        let k = self.wavevector();
        let curvature = p.x * p.x * self.inverse_radius_of_curvature(Axis::X, p.y)
            + p.z * p.z * self.inverse_radius_of_curvature(Axis::Z, p.y);
        let phase = -k * p.y + self.gouy_phase(p.y) - 0.5 * k * curvature + self.phase0;
        (amp, phase)
    }
}
