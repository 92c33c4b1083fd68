//! Scenario files: strict TOML with physical units (Hz, W, m, s).

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::beam_optics::{BeamFramePoint, BeamGeometry};
use crate::constants::{hz_to_angular, AMU, YB171_MASS};
use crate::dynamics::{eta_xi, GateGeometry, PhaseErrorModel, PulseSequence, SequenceErrors, DEFAULT_TAIL};
use crate::error::{Error, Result};
use crate::expansion::{Caps, HeatingHypotheses};
use crate::modes::{chain_normal_modes, doppler_nbar, Direction, ModeProjection, ModeProjections};

/// Scenario format understood by this build.
pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub beam1: BeamSection,
    pub beam2: BeamSection,
    pub trap: TrapSection,
    pub addressing: AddressingSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub truncation: TruncationSection,
    #[serde(default)]
    pub fit: FitSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSection {
    pub power: f64,
    pub wavelength: f64,
    pub waist_x: f64,
    pub waist_z: f64,
    #[serde(default)]
    pub focal_y_x: f64,
    #[serde(default)]
    pub focal_y_z: f64,
    #[serde(default)]
    pub phase0: f64,
    #[serde(default = "plus_one")]
    pub propagation_sign: i8,
}

fn plus_one() -> i8 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Yb171,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub frequency_hz: f64,
    pub direction: Direction,
    /// Mode-vector components of the addressed ion along `x`, `y`, `z`.
    pub nu: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSection {
    pub ions: usize,
    #[serde(default = "yb171")]
    pub species: Species,
    /// Required when `species = "custom"`.
    pub mass_amu: Option<f64>,
    pub axial_com_hz: Option<f64>,
    pub horizontal_hz: Option<f64>,
    pub vertical_hz: Option<f64>,
    /// Measured mode table for the addressed ion; replaces the chain solver.
    pub modes: Option<Vec<ModeEntry>>,
}

fn yb171() -> Species {
    Species::Yb171
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeChoice {
    Named(NamedMode),
    Index(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedMode {
    Com,
}

impl Default for ModeChoice {
    fn default() -> Self {
        ModeChoice::Named(NamedMode::Com)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSection {
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default)]
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AddressingSection {
    #[serde(default)]
    pub ion: usize,
    pub geometry: GateGeometry,
    #[serde(default)]
    pub mode: ModeChoice,
    /// Ion equilibrium in each beam's frame; zero when absent.
    pub equilibrium: Option<[PointSection; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NbarSource {
    Doppler,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridVariable {
    Nbar,
    Delay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub variable: GridVariable,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            variable: GridVariable::Nbar,
            values: None,
            start: None,
            stop: None,
            points: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    Sk1,
    Tycko,
}

impl SequenceKind {
    pub fn sequence(self) -> PulseSequence {
        match self {
            SequenceKind::Sk1 => PulseSequence::sk1(),
            SequenceKind::Tycko => PulseSequence::tycko(),
        }
    }

    pub fn column(self) -> &'static str {
        match self {
            SequenceKind::Sk1 => "p_up_sk1",
            SequenceKind::Tycko => "p_up_tycko",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "doppler")]
    pub nbar0_source: NbarSource,
    pub nbar0: Option<f64>,
    #[serde(default = "default_linewidth")]
    pub linewidth_hz: f64,
    /// Quanta per second.
    #[serde(default)]
    pub heating_rate: f64,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub sequences: Vec<SequenceKind>,
    /// Systematic phase error per gate, rad.
    #[serde(default)]
    pub phase_error: f64,
    #[serde(default = "progressive")]
    pub phase_model: PhaseErrorModel,
    #[serde(default)]
    pub amplitude_error: f64,
    #[serde(default = "default_tail")]
    pub tail: f64,
}

fn doppler() -> NbarSource {
    NbarSource::Doppler
}
fn default_linewidth() -> f64 {
    19.6e6
}
fn progressive() -> PhaseErrorModel {
    PhaseErrorModel::Progressive
}
fn default_tail() -> f64 {
    DEFAULT_TAIL
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            nbar0_source: NbarSource::Doppler,
            nbar0: None,
            linewidth_hz: default_linewidth(),
            heating_rate: 0.0,
            grid: GridSection::default(),
            sequences: Vec::new(),
            phase_error: 0.0,
            phase_model: PhaseErrorModel::Progressive,
            amplitude_error: 0.0,
            tail: DEFAULT_TAIL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSection {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_cap")]
    pub p_cap: u32,
    #[serde(default = "default_cap")]
    pub q_cap: u32,
    #[serde(default = "even_axial")]
    pub even_axial: usize,
    #[serde(default = "even_transverse")]
    pub even_transverse: usize,
    #[serde(default = "ions_assumed")]
    pub ions_assumed: usize,
    #[serde(default = "cold_tail")]
    pub tail: f64,
}

fn default_threshold() -> f64 {
    1e-2
}
fn default_cap() -> u32 {
    8
}
fn even_axial() -> usize {
    10_000
}
fn even_transverse() -> usize {
    100
}
fn ions_assumed() -> usize {
    50
}
fn cold_tail() -> f64 {
    1e-3
}

impl Default for TruncationSection {
    fn default() -> Self {
        Self {
            threshold: default_threshold(),
            p_cap: default_cap(),
            q_cap: default_cap(),
            even_axial: even_axial(),
            even_transverse: even_transverse(),
            ions_assumed: ions_assumed(),
            tail: cold_tail(),
        }
    }
}

/// Measurement tables for `fit`, relative to the config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub static_data: Option<PathBuf>,
    pub optimized_data: Option<PathBuf>,
}

/// Quantities derived from a validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub beams: [BeamGeometry; 2],
    pub equilibrium: [BeamFramePoint; 2],
    pub projections: ModeProjections,
    /// Index of the gate mode in `projections.modes`.
    pub mode: usize,
    pub eta: f64,
    pub xi: f64,
    pub nbar0: f64,
    /// Mean occupations at which the gate is evaluated.
    pub nbar_grid: Vec<f64>,
    pub sequences: Vec<SequenceKind>,
    pub errors: SequenceErrors,
    pub tail: f64,
}

/// Rewrites a parameter error as a config error under `prefix`.
fn at(prefix: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::InvalidParameter { name, reason } => Error::config(&format!("{prefix}.{name}"), reason),
        other => other,
    }
}

fn positive(path: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(path, format!("must be positive, got {v}")))
    }
}

impl BeamSection {
    fn geometry(&self, path: &str) -> Result<BeamGeometry> {
        let b = BeamGeometry {
            power: self.power,
            wavelength: self.wavelength,
            waist_x: self.waist_x,
            waist_z: self.waist_z,
            focal_y_x: self.focal_y_x,
            focal_y_z: self.focal_y_z,
            phase0: self.phase0,
            propagation_sign: self.propagation_sign,
        };
        b.validate().map_err(at(path))?;
        Ok(b)
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let path = e.span().map(|s| format!("bytes {}..{}", s.start, s.end)).unwrap_or_default();
            Error::config(&path, e.message().to_string())
        })?;
        if cfg.version != CONFIG_VERSION {
            return Err(Error::config(
                "version",
                format!("unsupported version {} (expected {CONFIG_VERSION})", cfg.version),
            ));
        }
        Ok(cfg)
    }

    pub fn beams(&self) -> Result<[BeamGeometry; 2]> {
        Ok([self.beam1.geometry("beam1")?, self.beam2.geometry("beam2")?])
    }

    pub fn mass(&self) -> Result<f64> {
        match (self.trap.species, self.trap.mass_amu) {
            (Species::Yb171, None) => Ok(YB171_MASS),
            (Species::Yb171, Some(_)) => Err(Error::config("trap.mass_amu", "only allowed with species = \"custom\"")),
            (Species::Custom, Some(m)) => Ok(positive("trap.mass_amu", m)? * AMU),
            (Species::Custom, None) => Err(Error::config("trap.mass_amu", "required for species = \"custom\"")),
        }
    }

    /// Mode projections of the addressed ion and the gate mode index.
    pub fn projections(&self) -> Result<(ModeProjections, usize)> {
        let t = &self.trap;
        if t.ions == 0 {
            return Err(Error::config("trap.ions", "must be at least 1"));
        }
        let mass = self.mass()?;
        let proj = match &t.modes {
            Some(table) => {
                if t.axial_com_hz.is_some() || t.horizontal_hz.is_some() || t.vertical_hz.is_some() {
                    return Err(Error::config("trap.modes", "give either a mode table or trap frequencies, not both"));
                }
                if table.is_empty() {
                    return Err(Error::config("trap.modes", "must not be empty"));
                }
                let mut modes = Vec::with_capacity(table.len());
                for (i, m) in table.iter().enumerate() {
                    let f = positive(&format!("trap.modes[{i}].frequency_hz"), m.frequency_hz)?;
                    modes.push(ModeProjection {
                        frequency: hz_to_angular(f),
                        direction: m.direction,
                        nu: m.nu,
                    });
                }
                ModeProjections {
                    ions: t.ions,
                    mass,
                    modes,
                }
            }
            None => {
                let req = |name: &str, v: Option<f64>| -> Result<f64> {
                    let path = format!("trap.{name}");
                    positive(&path, v.ok_or_else(|| Error::config(&path, "required without a mode table"))?)
                };
                let ax = req("axial_com_hz", t.axial_com_hz)?;
                let h = req("horizontal_hz", t.horizontal_hz)?;
                let v = req("vertical_hz", t.vertical_hz)?;
                if self.addressing.ion >= t.ions {
                    return Err(Error::config("addressing.ion", format!("must be below trap.ions = {}", t.ions)));
                }
                let chain = chain_normal_modes(t.ions, mass, hz_to_angular(ax), hz_to_angular(h), hz_to_angular(v))
                    .map_err(at("trap"))?;
                chain.projections(self.addressing.ion).map_err(at("addressing"))?
            }
        };
        let mode = match self.addressing.mode {
            ModeChoice::Index(i) if i < proj.modes.len() => i,
            ModeChoice::Index(i) => {
                return Err(Error::config(
                    "addressing.mode",
                    format!("index {i} out of range for {} modes", proj.modes.len()),
                ))
            }
            // The axial centre-of-mass mode is the lowest axial frequency.
            ModeChoice::Named(NamedMode::Com) => proj
                .indices(Direction::Axial)
                .into_iter()
                .min_by(|&a, &b| proj.modes[a].frequency.total_cmp(&proj.modes[b].frequency))
                .ok_or_else(|| Error::config("addressing.mode", "no axial mode available"))?,
        };
        Ok((proj, mode))
    }

    pub fn equilibrium(&self) -> Result<[BeamFramePoint; 2]> {
        let mut out = [BeamFramePoint::default(); 2];
        if let Some(eq) = &self.addressing.equilibrium {
            for (i, p) in eq.iter().enumerate() {
                if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                    return Err(Error::config(&format!("addressing.equilibrium[{i}]"), "must be finite"));
                }
                out[i] = BeamFramePoint { x: p.x, y: p.y, z: p.z };
            }
        }
        Ok(out)
    }

    pub fn nbar0(&self, mode_frequency: f64) -> Result<f64> {
        let r = &self.run;
        match (r.nbar0_source, r.nbar0) {
            (NbarSource::Doppler, None) => {
                let lw = positive("run.linewidth_hz", r.linewidth_hz)?;
                doppler_nbar(hz_to_angular(lw), mode_frequency).map_err(at("run"))
            }
            (NbarSource::Doppler, Some(_)) => Err(Error::config("run.nbar0", "only allowed with nbar0_source = \"explicit\"")),
            (NbarSource::Explicit, Some(v)) if v >= 0.0 && v.is_finite() => Ok(v),
            (NbarSource::Explicit, Some(v)) => Err(Error::config("run.nbar0", format!("must be non-negative, got {v}"))),
            (NbarSource::Explicit, None) => Err(Error::config("run.nbar0", "required for nbar0_source = \"explicit\"")),
        }
    }

    fn grid_values(&self) -> Result<Vec<f64>> {
        let g = &self.run.grid;
        let vals = match (&g.values, g.start, g.stop, g.points) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => {
                if n < 2 {
                    return Err(Error::config("run.grid.points", "need at least two points"));
                }
                if !(a.is_finite() && b.is_finite() && b > a) {
                    return Err(Error::config("run.grid.stop", "must exceed run.grid.start"));
                }
                (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
            }
            _ => {
                return Err(Error::config(
                    "run.grid",
                    "give either `values` or all of `start`, `stop`, `points`",
                ))
            }
        };
        if vals.is_empty() {
            return Err(Error::config("run.grid.values", "must not be empty"));
        }
        if vals.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::config("run.grid.values", "entries must be finite and non-negative"));
        }
        Ok(vals)
    }

    /// Validates everything a delayed-gate run needs.
    pub fn prepare(&self) -> Result<Prepared> {
        let beams = self.beams()?;
        let equilibrium = self.equilibrium()?;
        let (projections, mode) = self.projections()?;
        let defocus = equilibrium[0].y - beams[0].focal_y_x;
        let (eta, xi) = eta_xi(self.addressing.geometry, &beams, &projections, mode, equilibrium[0].x, defocus)
            .map_err(at("addressing"))?;
        let nbar0 = self.nbar0(projections.modes[mode].frequency)?;
        let r = &self.run;
        if !(r.tail > 0.0 && r.tail < 1.0) {
            return Err(Error::config("run.tail", "must lie in (0, 1)"));
        }
        if !(r.heating_rate >= 0.0 && r.heating_rate.is_finite()) {
            return Err(Error::config("run.heating_rate", "must be finite and non-negative"));
        }
        if !r.phase_error.is_finite() || !(r.amplitude_error.is_finite() && r.amplitude_error > -1.0) {
            return Err(Error::config("run.phase_error", "errors must be finite, amplitude error above −1"));
        }
        let grid = self.grid_values()?;
        let nbar_grid = match r.grid.variable {
            GridVariable::Nbar => grid,
            GridVariable::Delay => {
                if r.heating_rate == 0.0 {
                    log::warn!("run.heating_rate is zero; every delay maps to n̄₀");
                }
                grid.iter().map(|d| nbar0 + r.heating_rate * d).collect()
            }
        };
        let mut sequences = r.sequences.clone();
        sequences.sort_by_key(|s| *s as u8);
        sequences.dedup();
        Ok(Prepared {
            beams,
            equilibrium,
            projections,
            mode,
            eta,
            xi,
            nbar0,
            nbar_grid,
            sequences,
            errors: SequenceErrors {
                phase_error: r.phase_error,
                phase_model: r.phase_model,
                amplitude_error: r.amplitude_error,
            },
            tail: r.tail,
        })
    }

    pub fn caps(&self) -> Caps {
        Caps::new(self.truncation.p_cap, self.truncation.q_cap)
    }

    pub fn heating_hypotheses(&self) -> Result<HeatingHypotheses> {
        let t = &self.truncation;
        if !(t.tail > 0.0 && t.tail < 1.0) {
            return Err(Error::config("truncation.tail", "must lie in (0, 1)"));
        }
        if t.even_axial == 0 || t.even_transverse == 0 || t.ions_assumed == 0 {
            return Err(Error::config("truncation", "cutoffs and ions_assumed must be positive"));
        }
        Ok(HeatingHypotheses {
            even_axial: t.even_axial,
            even_transverse: t.even_transverse,
            ions_assumed: t.ions_assumed,
            linewidth: hz_to_angular(positive("run.linewidth_hz", self.run.linewidth_hz)?),
            tail: t.tail,
        })
    }
}
