//! Debye–Waller norm for co- and counter-propagating beams.

use ionlight::constants::{hz_to_angular, YB171_MASS};
use ionlight::dynamics::{debye_waller_norm, displacement_diagonal, thermal_debye_waller_suppression, ThermalState};
use ionlight::modes::zero_point_spread;
use std::f64::consts::PI;

fn main() -> ionlight::Result<()> {
    let k = 2.0 * PI / 355e-9;
    let zeta = zero_point_spread(YB171_MASS, hz_to_angular(3.0e6))?;
    // Net coefficient of a horizontal mode: the two beams nearly cancel when
    // co-propagating and add when counter-propagating.
    let co = k * zeta * 0.05 * 1e-3;
    let counter = 2.0 * k * zeta;
    println!("kappa co = {co:.3e}, counter = {counter:.4}");

    for (label, kappa, n_max) in [("co, n <= 100", co, 100), ("counter, n <= 2", counter, 2), ("counter, n <= 10", counter, 10)] {
        let dw = debye_waller_norm(kappa, n_max)?;
        println!("{label:>18}: norm {:.4e} (padding {})", dw.norm, dw.padding);
    }

    println!("\ndiagonal <n|D|n> at kappa = {counter:.4}");
    for n in 0..=4 {
        println!("  n = {n}: {:.6}", displacement_diagonal(counter, n));
    }
    let cold = ThermalState::new(0.1, 1e-9)?;
    let doppler = ThermalState::new(3.3, 1e-9)?;
    println!(
        "thermal suppression: sideband cooled {:.3e}, Doppler {:.3e}",
        thermal_debye_waller_suppression(counter, &cold),
        thermal_debye_waller_suppression(counter, &doppler)
    );
    Ok(())
}
