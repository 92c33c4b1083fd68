//! Ion–light interaction modelling for single-qubit Raman gates on trapped-ion chains.
//!
//! The crate follows a field from its optics to a gate fidelity:
//!
//! * [`beam_optics`]: elliptical, astigmatic Gaussian beams.
//! * [`modes`]: chain normal modes and the dimensionless mode couplings.
//! * [`expansion`]: ladder-operator series of the field factors and the
//!   operator-norm truncation engine.
//! * [`dynamics`]: the reduced gate, Fock-resolved rotation angles, thermal
//!   averages, composite pulses and a matrix-exponential oracle.
//! * [`calibration`]: Rabi-rate optimisation and heating-rate fits.
//! * [`scenario`]: configuration files and the runs behind the command-line tool.

pub mod beam_optics;
pub mod calibration;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod expansion;
pub mod modes;
pub mod scenario;
pub mod special;

pub use beam_optics::{Axis, BeamFramePoint, BeamGeometry};
pub use error::{Error, Result};
pub use modes::{ChainModes, CouplingParams, ModeProjections};
