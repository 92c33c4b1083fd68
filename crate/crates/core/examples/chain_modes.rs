//! Normal modes of a 25-ion chain and the c-coefficients seen by the middle ion.

use ionlight::constants::{hz_to_angular, YB171_MASS, YB_DOPPLER_LINEWIDTH};
use ionlight::modes::{chain_normal_modes, coupling_params, doppler_nbar, AlignmentError, Direction};
use ionlight::{Axis, BeamFramePoint, BeamGeometry};

fn main() -> ionlight::Result<()> {
    let modes = chain_normal_modes(
        25,
        YB171_MASS,
        hz_to_angular(148e3),
        hz_to_angular(3.0e6),
        hz_to_angular(2.5e6),
    )?;
    println!("orthonormality error {:.2e}", modes.orthonormality_error());

    let com = modes.com_index(Direction::Axial);
    let middle = 12;
    let proj = modes.projections(middle)?;
    println!(
        "axial COM {:.1} kHz, nu_x at ion {middle} = {:.6}",
        modes.frequencies[com] / hz_to_angular(1e3),
        proj.modes[com].nu[0]
    );
    for dir in Direction::ALL {
        let idx = proj.indices(dir);
        let lo = idx.iter().map(|&p| proj.modes[p].frequency).fold(f64::INFINITY, f64::min);
        let hi = idx.iter().map(|&p| proj.modes[p].frequency).fold(0.0, f64::max);
        println!(
            "{:>10}: {} modes, {:.3}-{:.3} MHz, Doppler nbar {:.1}-{:.1}",
            dir.label(),
            idx.len(),
            lo / hz_to_angular(1e6),
            hi / hz_to_angular(1e6),
            doppler_nbar(YB_DOPPLER_LINEWIDTH, hi)?,
            doppler_nbar(YB_DOPPLER_LINEWIDTH, lo)?
        );
    }

    // Trap axes tilted by 5 mrad about z still pass the alignment check at ε = 0.05.
    let tilted = modes.rotated(2, 0.005)?.projections(middle)?;
    let eps = AlignmentError::new(0.05)?;
    println!("alignment at 5 mrad tilt: {}", if eps.check(&tilted).is_ok() { "ok" } else { "violated" });

    let beam = BeamGeometry::focused(1e-3, 355e-9, 1.0e-6, 5.0e-6);
    let beams = [beam.clone(), beam];
    let eq = [BeamFramePoint::new(50e-9, 0.0, 20e-9), BeamFramePoint::default()];
    let c = coupling_params(&beams, &eq, &tilted)?;
    let b = &c.beams[0];
    println!("\ngamma0_x {:.3}, lambda0_x {:.3}", b.gamma0(Axis::X), b.lambda0(Axis::X));
    println!("{:>6} {:>10} {:>11} {:>11} {:>11}", "mode", "kHz", "c_beta", "c_gamma_x", "c_lambda_x");
    for p in [com, com + 1, proj.indices(Direction::Horizontal)[24], proj.indices(Direction::Vertical)[24]] {
        println!(
            "{:>6} {:>10.1} {:>11.3e} {:>11.3e} {:>11.3e}",
            p,
            c.frequencies[p] / hz_to_angular(1e3),
            b.c_beta[p],
            b.c_gamma(Axis::X)[p],
            b.c_lambda(Axis::X)[p]
        );
    }
    Ok(())
}
