//! Thermal bright population for a static and a re-optimised pulse area as the
//! axial mode heats up.

use ionlight::calibration::{optimize_rabi_table, HeatingModel};
use ionlight::dynamics::{p_up_table, thermal_cutoff, ThermalState, ThetaTable, DEFAULT_TAIL};

fn main() -> ionlight::Result<()> {
    // Single ion at 153 kHz, co-propagating beams with a 1.4 μm waist.
    let (eta, xi) = (0.0140395, 0.0);
    let heating = HeatingModel::new(64.0, 96e3)?;
    let delays: Vec<f64> = (0..=10).map(|i| i as f64 * 1e-3).collect();

    let n_max = thermal_cutoff(heating.nbar(*delays.last().unwrap()), DEFAULT_TAIL)?;
    let table = ThetaTable::new(n_max, eta, xi)?;
    let st = optimize_rabi_table(&ThermalState::with_default_tail(heating.nbar0)?, &table)?;
    println!("static calibration Omega0 t = {st:.6}");

    println!("{:>6} {:>8} {:>10} {:>10} {:>8}", "dt_ms", "nbar", "P_static", "P_opt", "ratio");
    let mut guess = st;
    for &dt in &delays {
        let nbar = heating.nbar(dt);
        let state = ThermalState::with_default_tail(nbar)?;
        let opt = ionlight::calibration::optimize_rabi_from(&state, &table, guess)?;
        guess = opt;
        println!(
            "{:>6.1} {:>8.1} {:>10.6} {:>10.6} {:>8.5}",
            dt * 1e3,
            nbar,
            p_up_table(&state, &table, st)?,
            p_up_table(&state, &table, opt)?,
            opt / st
        );
    }
    Ok(())
}
