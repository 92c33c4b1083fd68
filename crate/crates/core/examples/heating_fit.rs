//! Recovers a planted heating rate and readout offset from delayed-gate curves.
//!
//! With a directory argument the noisy tables are also written there as
//! `fig1_static.csv` and `fig1_optimized.csv`, the inputs of the `fit` scenario.

use ionlight::calibration::{fit_heating, simulate_curves, FitOptions, HeatingData, HeatingModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::fmt::Write as _;
use std::path::PathBuf;

const SIGMA: f64 = 0.01;

fn noisy(clean: &HeatingData, seed: u64) -> HeatingData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, SIGMA).unwrap();
    let mut out = clean.clone();
    for p in out.static_curve.iter_mut().chain(out.optimized_curve.iter_mut()) {
        p.p_up += noise.sample(&mut rng);
        p.sigma = Some(SIGMA);
    }
    out
}

fn table(curve: &[ionlight::calibration::DelayPoint], rates: Option<&[ionlight::calibration::RatePoint]>) -> String {
    let mut s = String::from("delta_t_s,p_up,p_up_sigma");
    if rates.is_some() {
        s.push_str(",omega_t_opt");
    }
    s.push('\n');
    for (i, p) in curve.iter().enumerate() {
        write!(s, "{},{},{}", p.delay, p.p_up, p.sigma.unwrap_or(SIGMA)).unwrap();
        if let Some(r) = rates {
            write!(s, ",{}", r[i].omega_t_opt).unwrap();
        }
        s.push('\n');
    }
    s
}

fn main() -> ionlight::Result<()> {
    let (nbar0, eta, xi) = (64.0, 0.0140395, 0.0);
    let (ndot, delta_p) = (96e3, 0.02);
    let delays: Vec<f64> = (0..=10).map(|i| i as f64 * 1e-3).collect();
    let clean = simulate_curves(HeatingModel::new(nbar0, ndot)?, eta, xi, &delays, delta_p)?;
    let opts = FitOptions::new(nbar0, eta, xi);

    let exact = fit_heating(&clean, &opts)?;
    println!(
        "noiseless: ndot = {:.6e}/s (planted {ndot:e}), delta_p = {:.6}",
        exact.ndot, exact.delta_p
    );

    let data = noisy(&clean, 7);
    let fit = fit_heating(&data, &opts)?;
    let sd = fit.covariance[0][0].sqrt();
    println!(
        "1% noise:  ndot = {:.4e} +- {:.1e}/s, delta_p = {:.4}, {} simplex iterations",
        fit.ndot, sd, fit.delta_p, fit.iterations
    );

    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("fig1_static.csv"), table(&data.static_curve, None))?;
        std::fs::write(
            dir.join("fig1_optimized.csv"),
            table(&data.optimized_curve, Some(&data.optimal_rate)),
        )?;
        println!("tables written to {}", dir.display());
    }
    Ok(())
}
