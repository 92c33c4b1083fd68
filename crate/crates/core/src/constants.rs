//! Physical constants in SI units.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Unified atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;

/// Mass of a ¹⁷¹Yb⁺ ion (electron mass neglected), kg.
pub const YB171_MASS: f64 = 171.0 * AMU;

/// Natural linewidth of the Yb⁺ ²P₁/₂ level, rad/s.
pub const YB_DOPPLER_LINEWIDTH: f64 = 2.0 * std::f64::consts::PI * 19.6e6;

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_8128e-12;

/// Converts a frequency in Hz to an angular frequency in rad/s.
pub fn hz_to_angular(f: f64) -> f64 {
    2.0 * std::f64::consts::PI * f
}
