//! Spot size, wavefront curvature and Gouy phase of an astigmatic Raman beam.

use ionlight::{Axis, BeamFramePoint, BeamGeometry};

fn main() -> ionlight::Result<()> {
    let mut beam = BeamGeometry::focused(1e-3, 355e-9, 1.0e-6, 5.0e-6);
    // Loose-axis focus 20 μm behind the tight one.
    beam.focal_y_z = 20e-6;
    beam.validate()?;

    println!("k = {:.4e} 1/m", beam.wavevector());
    for axis in Axis::BOTH {
        println!(
            "axis {}: waist {:.2} um, Rayleigh range {:.2} um",
            axis.label(),
            beam.waist(axis) * 1e6,
            beam.rayleigh_range(axis) * 1e6
        );
    }

    println!("\n{:>8} {:>10} {:>10} {:>12} {:>10} {:>10}", "y_um", "w_x_um", "w_z_um", "1/R_x", "gouy", "|E|");
    for i in -4..=4 {
        let y = i as f64 * 5e-6;
        let (amp, _phase) = beam.field_at(BeamFramePoint::new(0.0, y, 0.0));
        println!(
            "{:>8.1} {:>10.3} {:>10.3} {:>12.4e} {:>10.5} {:>10.3e}",
            y * 1e6,
            beam.spot_size(Axis::X, y) * 1e6,
            beam.spot_size(Axis::Z, y) * 1e6,
            beam.inverse_radius_of_curvature(Axis::X, y),
            beam.gouy_phase(y),
            amp
        );
    }
    Ok(())
}
