//! End-to-end runs behind the command-line subcommands.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::config::ScenarioConfig;
use super::output::{build_id, config_hash, CurveOutput};
use crate::calibration::{
    fit_heating, fit_power_law, optimize_rabi_table, DelayPoint, FitOptions, FitResult, HeatingData, PowerLawFit,
    RatePoint,
};
use crate::constants::hz_to_angular;
use crate::dynamics::{p_up_table, sequence_p_up, thermal_cutoff, ThermalState, ThetaTable};
use crate::error::{Error, Result};
use crate::expansion::{beam_function_set, heating_scenarios, truncation_report, TruncationPolicy, TruncationReport};
use crate::modes::coupling_params;

/// Static and optimised `P↑`, the area ratio and any composite sequences
/// over the configured grid. Grid points run in parallel on the current
/// rayon pool; the output does not depend on the pool size.
pub fn run_delayed_gate(cfg: &ScenarioConfig, config_bytes: &[u8]) -> Result<CurveOutput> {
    let p = cfg.prepare()?;
    let top = p.nbar_grid.iter().fold(p.nbar0, |m, &v| m.max(v));
    let table = ThetaTable::new(thermal_cutoff(top, p.tail)?, p.eta, p.xi)?;
    let s0 = ThermalState::new(p.nbar0, p.tail)?;
    let omega_st = optimize_rabi_table(&s0, &table)?;

    let rows = p
        .nbar_grid
        .par_iter()
        .map(|&nbar| -> Result<Vec<f64>> {
            let s = ThermalState::new(nbar, p.tail)?;
            let opt = optimize_rabi_table(&s, &table)?;
            let mut row = vec![
                p_up_table(&s, &table, omega_st)?,
                p_up_table(&s, &table, opt)?,
                opt / omega_st,
            ];
            for k in &p.sequences {
                row.push(sequence_p_up(&k.sequence(), &s, &table, opt, &p.errors)?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = CurveOutput::new("nbar", p.nbar_grid.clone());
    let mut names = vec!["p_up_static", "p_up_optimized", "rabi_ratio"];
    names.extend(p.sequences.iter().map(|k| k.column()));
    for (j, name) in names.iter().enumerate() {
        out.push_series(name, rows.iter().map(|r| r[j]).collect())?;
    }
    out.meta("config_sha256", config_hash(config_bytes));
    out.meta("build", build_id());
    out.meta("eta", p.eta);
    out.meta("xi", p.xi);
    out.meta("nbar0", p.nbar0);
    out.meta("mode_frequency_hz", p.projections.modes[p.mode].frequency / std::f64::consts::TAU);
    out.meta("omega_t_static", omega_st);
    out.meta("thermal_tail", p.tail);
    out.meta("phase_error", p.errors.phase_error);
    out.meta("phase_model", format!("{:?}", p.errors.phase_model).to_lowercase());
    out.meta("amplitude_error", p.errors.amplitude_error);
    Ok(out)
}

/// Keep/drop table for both beams' field factors under the configured
/// heating hypotheses.
pub fn run_truncation_report(cfg: &ScenarioConfig) -> Result<TruncationReport> {
    let beams = cfg.beams()?;
    let eq = cfg.equilibrium()?;
    let (proj, _) = cfg.projections()?;
    let params = coupling_params(&beams, &eq, &proj)?;
    let mut functions = beam_function_set(&params, 0, cfg.caps())?;
    functions.extend(beam_function_set(&params, 1, cfg.caps())?);
    let scenarios = heating_scenarios(&params, &cfg.heating_hypotheses()?)?;
    let t = cfg.truncation.threshold;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::config("truncation.threshold", "must be finite and non-negative"));
    }
    let policy = TruncationPolicy::new(t, scenarios)?;
    truncation_report(&functions, &policy)
}

/// Report CSV preceded by the same metadata lines as curve outputs.
pub fn write_truncation_csv<W: Write>(report: &TruncationReport, config_bytes: &[u8], mut out: W) -> Result<()> {
    writeln!(out, "# build={}", build_id())?;
    writeln!(out, "# config_sha256={}", config_hash(config_bytes))?;
    writeln!(out, "# threshold={}", report.threshold)?;
    report.write_csv(out)
}

fn data_err(line: Option<u64>, reason: impl Into<String>) -> Error {
    Error::Data {
        line,
        reason: reason.into(),
    }
}

/// Parses a delay table with columns `delta_t_s`, `p_up` and optional
/// `p_up_sigma`, `omega_t_opt`. Lines starting with `#` are skipped.
pub fn read_delay_table<R: Read>(reader: R) -> Result<(Vec<DelayPoint>, Vec<RatePoint>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| data_err(Some(1), e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let t_col = col("delta_t_s").ok_or_else(|| data_err(None, "missing column `delta_t_s`"))?;
    let p_col = col("p_up").ok_or_else(|| data_err(None, "missing column `p_up`"))?;
    let s_col = col("p_up_sigma");
    let o_col = col("omega_t_opt");
    let mut pts = Vec::new();
    let mut rates = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| data_err(e.position().map(|p| p.line()), e.to_string()))?;
        let line = rec.position().map(|p| p.line());
        let num = |i: usize, name: &str| -> Result<Option<f64>> {
            match rec.get(i) {
                None | Some("") => Ok(None),
                Some(s) => s
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| data_err(line, format!("column `{name}`: cannot parse `{s}`"))),
            }
        };
        let delay = num(t_col, "delta_t_s")?.ok_or_else(|| data_err(line, "empty `delta_t_s`"))?;
        if let Some(p) = num(p_col, "p_up")? {
            let sigma = match s_col {
                Some(i) => num(i, "p_up_sigma")?,
                None => None,
            };
            pts.push(DelayPoint { delay, p_up: p, sigma });
        }
        if let Some(i) = o_col {
            if let Some(o) = num(i, "omega_t_opt")? {
                rates.push(RatePoint { delay, omega_t_opt: o });
            }
        }
    }
    Ok((pts, rates))
}

/// Fit outcome with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub build: String,
    pub config_sha256: String,
    pub nbar0: f64,
    pub eta: f64,
    pub xi: f64,
    pub fit: FitResult,
}

fn open(base: &Path, rel: &Path) -> Result<std::fs::File> {
    let p = if rel.is_absolute() { rel.to_path_buf() } else { base.join(rel) };
    Ok(std::fs::File::open(p)?)
}

/// Joint heating fit to the tables named in the `[fit]` section, resolved
/// relative to `base`. `simplex_tol` overrides the simplex diameter tolerance.
pub fn run_fit(cfg: &ScenarioConfig, config_bytes: &[u8], base: &Path, simplex_tol: Option<f64>) -> Result<FitReport> {
    let p = cfg.prepare()?;
    let mut data = HeatingData::default();
    if let Some(path) = &cfg.fit.static_data {
        let (pts, rates) = read_delay_table(open(base, path)?)?;
        if !rates.is_empty() {
            log::warn!("ignoring `omega_t_opt` in the static table");
        }
        data.static_curve = pts;
    }
    if let Some(path) = &cfg.fit.optimized_data {
        let (pts, rates) = read_delay_table(open(base, path)?)?;
        data.optimized_curve = pts;
        data.optimal_rate = rates;
    }
    if cfg.fit.static_data.is_none() && cfg.fit.optimized_data.is_none() {
        return Err(Error::config("fit", "name at least one of `static_data`, `optimized_data`"));
    }
    let mut opts = FitOptions::new(p.nbar0, p.eta, p.xi);
    if let Some(t) = simplex_tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::config("--tolerance", "must be positive"));
        }
        opts.simplex.diameter_tol = t;
    }
    let fit = fit_heating(&data, &opts)?;
    Ok(FitReport {
        build: build_id(),
        config_sha256: config_hash(config_bytes),
        nbar0: p.nbar0,
        eta: p.eta,
        xi: p.xi,
        fit,
    })
}

/// Input of the power-law aggregation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLawConfig {
    pub version: u32,
    pub points: Vec<PowerLawPoint>,
}

/// One mode frequency with either a rate or a fit output to read it from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLawPoint {
    pub frequency_hz: f64,
    /// Quanta per second.
    pub ndot: Option<f64>,
    pub fit: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawReport {
    pub build: String,
    pub config_sha256: String,
    /// `(ω, ṅ)` pairs, rad/s and quanta/s.
    pub points: Vec<(f64, f64)>,
    /// Prefactor for `ω` in rad/s.
    pub fit: PowerLawFit,
}

pub fn run_power_law(text: &str, base: &Path) -> Result<PowerLawReport> {
    let cfg: PowerLawConfig = toml::from_str(text).map_err(|e| Error::config("", e.message().to_string()))?;
    if cfg.version != super::config::CONFIG_VERSION {
        return Err(Error::config("version", format!("unsupported version {}", cfg.version)));
    }
    let mut points = Vec::with_capacity(cfg.points.len());
    for (i, pt) in cfg.points.iter().enumerate() {
        let path = format!("points[{i}]");
        if !(pt.frequency_hz > 0.0 && pt.frequency_hz.is_finite()) {
            return Err(Error::config(&format!("{path}.frequency_hz"), "must be positive"));
        }
        let ndot = match (pt.ndot, &pt.fit) {
            (Some(v), None) => v,
            (None, Some(f)) => {
                let mut s = String::new();
                open(base, f)?.read_to_string(&mut s)?;
                let r: FitReport = serde_json::from_str(&s)
                    .map_err(|e| data_err(Some(e.line() as u64), format!("{}: {e}", f.display())))?;
                r.fit.ndot
            }
            _ => return Err(Error::config(&path, "give exactly one of `ndot`, `fit`")),
        };
        points.push((hz_to_angular(pt.frequency_hz), ndot));
    }
    let fit = fit_power_law(&points).map_err(|e| match e {
        Error::InvalidParameter { reason, .. } => Error::config("points", reason),
        e => e,
    })?;
    Ok(PowerLawReport {
        build: build_id(),
        config_sha256: config_hash(text.as_bytes()),
        points,
        fit,
    })
}
