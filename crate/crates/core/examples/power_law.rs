//! Heating rate against axial frequency: log-log fit of ṅ = c·ω^(−α).

use ionlight::calibration::fit_power_law;
use ionlight::constants::hz_to_angular;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

fn main() -> ionlight::Result<()> {
    let alpha = 1.8;
    let freqs: Vec<f64> = (0..8).map(|i| hz_to_angular(184e3 + i as f64 * (513e3 - 184e3) / 7.0)).collect();
    let c = 96e3 * hz_to_angular(153e3).powf(alpha);

    let exact: Vec<(f64, f64)> = freqs.iter().map(|&w| (w, c * w.powf(-alpha))).collect();
    let f = fit_power_law(&exact)?;
    println!("noiseless: alpha = {:.12}, c = {:.6e}", f.exponent, f.prefactor);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = LogNormal::new(0.0, 0.1).unwrap();
    let trials = 1000;
    let mut inside = 0;
    for _ in 0..trials {
        let pts: Vec<(f64, f64)> = exact.iter().map(|&(w, n)| (w, n * noise.sample(&mut rng))).collect();
        if (fit_power_law(&pts)?.exponent - alpha).abs() <= 0.2 {
            inside += 1;
        }
    }
    println!("10% log-normal noise: alpha within 0.2 in {inside}/{trials} trials");

    println!("\n{:>10} {:>12}", "f_kHz", "ndot_per_ms");
    for &(w, _) in &exact {
        println!("{:>10.1} {:>12.2}", w / hz_to_angular(1e3), f.predict(w) * 1e-3);
    }
    Ok(())
}
