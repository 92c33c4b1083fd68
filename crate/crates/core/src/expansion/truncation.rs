//! Operator-norm truncation of the A/B term lists.
//!
//! Each monomial `c · p̂₁^i q̂₁^j` is sized against the constant term of the
//! same function. With `p̂₁ = Σ_p c_p X_p` the operator norm is bounded by
//! `Σ_p |c_p| ‖X_p‖` on the truncated space of each mode, and powers by the
//! product of those bounds. A term is dropped only if it is below the
//! threshold in every scenario.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ladder::truncated_position_norm;
use super::series::{terms, Caps, FunctionId, SeriesTerm, Sign};
use crate::beam_optics::Axis;
use crate::dynamics::thermal_cutoff;
use crate::error::{Error, Result};
use crate::modes::{doppler_nbar, CouplingParams, Direction};

/// Per-mode Fock cutoffs for one heating hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub cutoffs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub threshold: f64,
    pub scenarios: Vec<Scenario>,
}

impl TruncationPolicy {
    pub fn new(threshold: f64, scenarios: Vec<Scenario>) -> Result<Self> {
        if !(0.0..1.0).contains(&threshold) {
            return Err(Error::invalid("threshold", "must lie in [0, 1)"));
        }
        if scenarios.is_empty() {
            return Err(Error::invalid("scenarios", "at least one scenario is required"));
        }
        Ok(Self {
            threshold,
            scenarios,
        })
    }
}

/// A function's term list together with the operators substituted for `p̂₁` and `q̂₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTerms {
    pub label: String,
    pub id: FunctionId,
    pub axis: Option<Axis>,
    pub terms: Vec<SeriesTerm>,
    pub p_sub: Vec<f64>,
    pub q_sub: Vec<f64>,
}

/// Caches `‖X‖` per truncated dimension.
#[derive(Debug, Default)]
pub struct NormCache {
    norms: HashMap<usize, f64>,
}

impl NormCache {
    pub fn position_norm(&mut self, n_max: usize) -> f64 {
        *self
            .norms
            .entry(n_max)
            .or_insert_with(|| truncated_position_norm(n_max + 1))
    }

    /// Triangle bound `Σ_p |c_p| ‖X_p‖`.
    pub fn substitution_norm(&mut self, coefficients: &[f64], scenario: &Scenario) -> Result<f64> {
        if coefficients.len() != scenario.cutoffs.len() {
            return Err(Error::invalid(
                "substitution",
                format!(
                    "{} coefficients for {} modes in scenario `{}`",
                    coefficients.len(),
                    scenario.cutoffs.len(),
                    scenario.name
                ),
            ));
        }
        let mut s = 0.0;
        for (c, &n) in coefficients.iter().zip(&scenario.cutoffs) {
            if *c != 0.0 {
                s += c.abs() * self.position_norm(n);
            }
        }
        Ok(s)
    }
}

/// `‖c_ij p̂₁^i q̂₁^j‖ / ‖c₀₀‖` per scenario.
pub fn fractional_contribution(
    term: &SeriesTerm,
    constant: &SeriesTerm,
    p_sub: &[f64],
    q_sub: &[f64],
    policy: &TruncationPolicy,
    cache: &mut NormCache,
) -> Result<Vec<f64>> {
    let c00 = constant.coefficient.norm();
    if c00 == 0.0 {
        return Err(Error::invalid("constant term", "vanishes"));
    }
    let mut out = Vec::with_capacity(policy.scenarios.len());
    for sc in &policy.scenarios {
        let mut v = term.coefficient.norm() / c00;
        if term.power_p > 0 {
            v *= cache.substitution_norm(p_sub, sc)?.powi(term.power_p as i32);
        }
        if term.power_q > 0 {
            v *= cache.substitution_norm(q_sub, sc)?.powi(term.power_q as i32);
        }
        out.push(v);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub function: String,
    pub id: FunctionId,
    pub axis: Option<Axis>,
    pub power_p: u32,
    pub power_q: u32,
    pub magnitude: f64,
    pub contributions: Vec<f64>,
    pub kept: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    pub threshold: f64,
    pub scenarios: Vec<String>,
    pub rows: Vec<ReportRow>,
}

pub fn truncation_report(functions: &[FunctionTerms], policy: &TruncationPolicy) -> Result<TruncationReport> {
    let mut cache = NormCache::default();
    let mut rows = Vec::new();
    for f in functions {
        let constant = f
            .terms
            .iter()
            .find(|t| t.power_p == 0 && t.power_q == 0)
            .ok_or_else(|| Error::invalid(&f.label, "term list has no constant term"))?;
        for t in &f.terms {
            let contributions = fractional_contribution(t, constant, &f.p_sub, &f.q_sub, policy, &mut cache)?;
            let kept = contributions.iter().any(|&c| c >= policy.threshold);
            rows.push(ReportRow {
                function: f.label.clone(),
                id: f.id,
                axis: f.axis,
                power_p: t.power_p,
                power_q: t.power_q,
                magnitude: t.coefficient.norm(),
                contributions,
                kept,
            });
        }
    }
    Ok(TruncationReport {
        threshold: policy.threshold,
        scenarios: policy.scenarios.iter().map(|s| s.name.clone()).collect(),
        rows,
    })
}

impl TruncationReport {
    /// `(power_p, power_q)` of the kept terms of one function.
    pub fn kept(&self, function: &str) -> Vec<(u32, u32)> {
        self.rows
            .iter()
            .filter(|r| r.function == function && r.kept)
            .map(|r| (r.power_p, r.power_q))
            .collect()
    }

    pub fn kept_count(&self) -> usize {
        self.rows.iter().filter(|r| r.kept).count()
    }

    /// Differences between the kept set and the simplified factor set
    /// `A₁ → const`, `A₂ → Gaussian in q̂₁ only`, `B₀ exact`, `B₁, B₂ → const`.
    ///
    /// The `x`-axis A₂ must keep every emitted `q̂₁` power; on `z` any
    /// `p̂₁`-free subset containing the constant is accepted.
    pub fn simplified_structure_mismatches(&self) -> Vec<String> {
        let mut labels: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !labels.contains(&r.function.as_str()) {
                labels.push(&r.function);
            }
        }
        let mut out = Vec::new();
        for label in labels {
            let rows: Vec<&ReportRow> = self.rows.iter().filter(|r| r.function == label).collect();
            let id = rows[0].id;
            let axis = rows[0].axis;
            for r in rows {
                let constant = r.power_p == 0 && r.power_q == 0;
                let expected = match id {
                    FunctionId::A1 | FunctionId::B1(_) | FunctionId::B2(_) => Some(constant),
                    FunctionId::B0(_) => Some(true),
                    FunctionId::A2 => {
                        if r.power_p > 0 {
                            Some(false)
                        } else if axis == Some(Axis::X) || constant {
                            Some(true)
                        } else {
                            None
                        }
                    }
                };
                if let Some(e) = expected {
                    if e != r.kept {
                        let worst = r.contributions.iter().cloned().fold(0.0, f64::max);
                        out.push(format!(
                            "{label} p^{} q^{}: {} (largest contribution {worst:.3e})",
                            r.power_p,
                            r.power_q,
                            if r.kept { "kept, expected dropped" } else { "dropped, expected kept" }
                        ));
                    }
                }
            }
        }
        out
    }

    /// CSV with columns `function, power_p, power_q, magnitude, <one per scenario>, kept`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["function".to_string(), "power_p".into(), "power_q".into(), "magnitude".into()];
        header.extend(self.scenarios.iter().map(|s| format!("contribution_{s}")));
        header.push("kept".into());
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![
                r.function.clone(),
                r.power_p.to_string(),
                r.power_q.to_string(),
                format!("{}", r.magnitude),
            ];
            rec.extend(r.contributions.iter().map(|c| format!("{c}")));
            rec.push(r.kept.to_string());
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Data {
            line: None,
            reason: format!("{other:?}"),
        },
    }
}

/// All nine factor functions of one beam. Beam 0 carries the `+` phase
/// factors and beam 1 the conjugate ones.
pub fn beam_function_set(params: &CouplingParams, beam: usize, caps: Caps) -> Result<Vec<FunctionTerms>> {
    let b = params
        .beams
        .get(beam)
        .ok_or_else(|| Error::invalid("beam", "must be 0 or 1"))?;
    let sign = if beam == 0 { Sign::Plus } else { Sign::Minus };
    let zeros = vec![0.0; params.frequencies.len()];
    let mut out = Vec::new();
    let tag = |name: &str, axis: Option<Axis>| match axis {
        Some(a) => format!("{name}[{},b{}]", a.label(), beam + 1),
        None => format!("{name}[b{}]", beam + 1),
    };
    for axis in Axis::BOTH {
        let id = FunctionId::A1;
        out.push(FunctionTerms {
            label: tag(&id.label(), Some(axis)),
            id,
            axis: Some(axis),
            terms: terms(id, b.lambda0(axis), 0.0, Caps::new(caps.p, 0))?,
            p_sub: b.c_lambda(axis).to_vec(),
            q_sub: zeros.clone(),
        });
    }
    for axis in Axis::BOTH {
        let id = FunctionId::A2;
        out.push(FunctionTerms {
            label: tag(&id.label(), Some(axis)),
            id,
            axis: Some(axis),
            terms: terms(id, b.lambda0(axis), b.gamma0(axis), caps)?,
            p_sub: b.c_lambda(axis).to_vec(),
            q_sub: b.c_gamma(axis).to_vec(),
        });
    }
    let id = FunctionId::B0(sign);
    out.push(FunctionTerms {
        label: tag(&id.label(), None),
        id,
        axis: None,
        terms: terms(id, 0.0, 0.0, Caps::new(caps.p, 0))?,
        p_sub: b.c_beta.clone(),
        q_sub: zeros.clone(),
    });
    for axis in Axis::BOTH {
        let id = FunctionId::B1(sign);
        out.push(FunctionTerms {
            label: tag(&id.label(), Some(axis)),
            id,
            axis: Some(axis),
            terms: terms(id, b.lambda0(axis), 0.0, Caps::new(caps.p, 0))?,
            p_sub: b.c_lambda(axis).to_vec(),
            q_sub: zeros.clone(),
        });
    }
    for axis in Axis::BOTH {
        let id = FunctionId::B2(sign);
        out.push(FunctionTerms {
            label: tag(&id.label(), Some(axis)),
            id,
            axis: Some(axis),
            terms: terms(id, b.lambda0(axis), b.gamma0(axis), caps)?,
            p_sub: b.c_lambda(axis).to_vec(),
            q_sub: b.c_gamma(axis).to_vec(),
        });
    }
    Ok(out)
}

/// Heating hypotheses used to size terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatingHypotheses {
    /// Cutoff of every axial mode when heating is spread evenly.
    pub even_axial: usize,
    /// Cutoff of every non-axial mode when heating is spread evenly.
    pub even_transverse: usize,
    /// Chain length assumed when all heating lands in one mode per direction.
    pub ions_assumed: usize,
    /// Doppler linewidth used for the cold modes, rad/s.
    pub linewidth: f64,
    /// Thermal tail left outside each cold-mode cutoff.
    pub tail: f64,
}

impl Default for HeatingHypotheses {
    fn default() -> Self {
        Self {
            even_axial: 10_000,
            even_transverse: 100,
            ions_assumed: 50,
            linewidth: crate::constants::YB_DOPPLER_LINEWIDTH,
            tail: 1e-3,
        }
    }
}

/// Two scenarios: even heating, and all heating in the most strongly
/// coupled mode of each direction with the rest at the Doppler limit.
pub fn heating_scenarios(params: &CouplingParams, h: &HeatingHypotheses) -> Result<Vec<Scenario>> {
    let n = params.frequencies.len();
    let even: Vec<usize> = params
        .directions
        .iter()
        .map(|d| match d {
            Direction::Axial => h.even_axial,
            _ => h.even_transverse,
        })
        .collect();
    let mut dominant = Vec::with_capacity(n);
    for p in 0..n {
        let nbar = doppler_nbar(h.linewidth, params.frequencies[p])?;
        dominant.push(thermal_cutoff(nbar, h.tail)?.max(1));
    }
    let b = &params.beams[0];
    for dir in Direction::ALL {
        let strength = |p: usize| match dir {
            Direction::Axial => b.c_gamma(Axis::X)[p].abs(),
            Direction::Horizontal => b.c_beta[p].abs(),
            Direction::Vertical => b.c_gamma(Axis::Z)[p].abs(),
        };
        let best = (0..n)
            .filter(|&p| params.directions[p] == dir)
            .max_by(|&a, &c| strength(a).total_cmp(&strength(c)));
        if let Some(p) = best {
            let level = if dir == Direction::Axial { h.even_axial } else { h.even_transverse };
            dominant[p] = level * h.ions_assumed;
        }
    }
    Ok(vec![
        Scenario {
            name: "even".into(),
            cutoffs: even,
        },
        Scenario {
            name: "dominant".into(),
            cutoffs: dominant,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn single(cutoff: usize) -> TruncationPolicy {
        TruncationPolicy::new(
            1e-2,
            vec![Scenario {
                name: "s".into(),
                cutoffs: vec![cutoff],
            }],
        )
        .unwrap()
    }

    fn term(c: f64, p: u32, q: u32) -> SeriesTerm {
        SeriesTerm {
            coefficient: Complex64::from(c),
            power_p: p,
            power_q: q,
        }
    }

    #[test]
    fn constant_contributes_one() {
        let mut cache = NormCache::default();
        let c = term(0.7, 0, 0);
        let v = fractional_contribution(&c, &c, &[0.3], &[0.2], &single(100), &mut cache).unwrap();
        assert_eq!(v, vec![1.0]);
    }

    #[test]
    fn axial_gamma_term_is_not_droppable() {
        let mut cache = NormCache::default();
        let v = fractional_contribution(&term(1.0, 1, 0), &term(1.0, 0, 0), &[1e-2], &[0.0], &single(10_000), &mut cache)
            .unwrap();
        assert!((v[0] - 2.0).abs() < 0.01, "{}", v[0]);
    }

    #[test]
    fn small_lambda_coefficient_is_droppable() {
        let mut cache = NormCache::default();
        let v = fractional_contribution(&term(0.5, 1, 0), &term(1.0, 0, 0), &[7e-5], &[0.0], &single(10_000), &mut cache)
            .unwrap();
        assert!(v[0] < 1e-2, "{}", v[0]);
    }

    #[test]
    fn threshold_zero_keeps_everything() {
        let f = FunctionTerms {
            label: "A1".into(),
            id: FunctionId::A1,
            axis: Some(Axis::X),
            terms: crate::expansion::a1_terms(0.1, 4).unwrap(),
            p_sub: vec![1e-9],
            q_sub: vec![0.0],
        };
        let mut p = single(10);
        let strict = truncation_report(std::slice::from_ref(&f), &p).unwrap();
        assert_eq!(strict.kept_count(), 1);
        p.threshold = 0.0;
        let all = truncation_report(&[f], &p).unwrap();
        assert_eq!(all.kept_count(), all.rows.len());
        let mut buf = Vec::new();
        all.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("function,power_p,power_q,magnitude,contribution_s,kept\n"));
    }

    #[test]
    fn empty_policy_is_rejected() {
        assert!(TruncationPolicy::new(1e-2, vec![]).is_err());
    }
}
