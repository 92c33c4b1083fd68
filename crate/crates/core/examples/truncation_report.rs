//! Keep/drop decision for every series term under two heating hypotheses.

use ionlight::constants::{hz_to_angular, YB171_MASS};
use ionlight::expansion::{beam_function_set, heating_scenarios, truncation_report, Caps, HeatingHypotheses, TruncationPolicy};
use ionlight::modes::{coupling_params, ModeProjections};
use ionlight::{BeamFramePoint, BeamGeometry};

fn main() -> ionlight::Result<()> {
    let beam = BeamGeometry::focused(1e-3, 355e-9, 1.0e-6, 5.0e-6);
    let beams = [beam.clone(), beam];
    let ax = [hz_to_angular(150e3), hz_to_angular(600e3), hz_to_angular(2.0e6)];
    let modes = ModeProjections::worst_case(1, YB171_MASS, 0.05, &ax, &[hz_to_angular(3.0e6)], &[hz_to_angular(2.5e6)])?;
    let eq = [BeamFramePoint::new(50e-9, 0.0, 50e-9), BeamFramePoint::new(50e-9, 0.0, 50e-9)];
    let params = coupling_params(&beams, &eq, &modes)?;

    let scenarios = heating_scenarios(&params, &HeatingHypotheses::default())?;
    for s in &scenarios {
        println!("scenario {:>8}: cutoffs {:?}", s.name, s.cutoffs);
    }
    let mut functions = beam_function_set(&params, 0, Caps::new(6, 6))?;
    functions.extend(beam_function_set(&params, 1, Caps::new(6, 6))?);

    for threshold in [1e-2, 1e-6] {
        let policy = TruncationPolicy::new(threshold, scenarios.clone())?;
        let report = truncation_report(&functions, &policy)?;
        println!("\nthreshold {threshold:e}: {} of {} terms kept", report.kept_count(), report.rows.len());
        if threshold == 1e-2 {
            for f in &functions {
                println!("  {:<10} kept (p, q): {:?}", f.label, report.kept(&f.label));
            }
            for m in report.simplified_structure_mismatches() {
                println!("  differs from the simplified set: {m}");
            }
        }
    }
    Ok(())
}
