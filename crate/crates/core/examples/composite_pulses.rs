//! SK1 and Tycko sequences against a bare π pulse, with and without a
//! progressive phase error, in a 25-ion chain.

use ionlight::calibration::optimize_rabi_table;
use ionlight::dynamics::{
    p_up_table, sequence_p_up, sequence_unitary, thermal_cutoff, unitarity_error, PhaseErrorModel, PulseSequence,
    SequenceErrors, ThermalState, ThetaTable, DEFAULT_TAIL,
};
use std::f64::consts::FRAC_PI_2;

fn main() -> ionlight::Result<()> {
    let (eta, xi) = (0.0032486, 0.0);
    let table = ThetaTable::new(thermal_cutoff(1000.0, DEFAULT_TAIL)?, eta, xi)?;
    let seqs = [("sk1", PulseSequence::sk1()), ("tycko", PulseSequence::tycko())];

    for phase_error in [0.0, 0.4] {
        let errors = SequenceErrors {
            phase_error,
            phase_model: PhaseErrorModel::Progressive,
            amplitude_error: 0.0,
        };
        println!("phase error {phase_error} rad/gate");
        println!("{:>7} {:>10} {:>10} {:>10}", "nbar", "P_opt", "P_sk1", "P_tycko");
        for nbar in [66.0, 200.0, 500.0, 1000.0] {
            let state = ThermalState::with_default_tail(nbar)?;
            let opt = optimize_rabi_table(&state, &table)?;
            let p: Vec<f64> = seqs
                .iter()
                .map(|(_, s)| sequence_p_up(s, &state, &table, opt, &errors))
                .collect::<ionlight::Result<_>>()?;
            println!("{:>7} {:>10.6} {:>10.6} {:>10.6}", nbar, p_up_table(&state, &table, opt)?, p[0], p[1]);
        }
    }

    println!("\nsingle-level robustness to a 5% area error");
    let errors = SequenceErrors { amplitude_error: 0.05, ..Default::default() };
    for (name, s) in [("single", PulseSequence::single())].into_iter().chain(seqs) {
        let u = sequence_unitary(&s, FRAC_PI_2, &errors);
        println!("  {name:>6}: 1 - P = {:.3e}, unitarity {:.1e}", 1.0 - u[(1, 0)].norm_sqr(), unitarity_error(&u));
    }
    Ok(())
}
