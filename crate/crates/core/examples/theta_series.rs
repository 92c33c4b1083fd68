//! Fock-resolved rotation angle: adaptive series against the aligned closed form.

use ionlight::dynamics::{theta_n_aligned, theta_n_series, SeriesOptions, ThetaTable};
use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

fn main() -> ionlight::Result<()> {
    // Three significant digits.
    let opts = SeriesOptions { rel_tol: 1e-3, m_cap: 2000 };
    println!("{:>6} {:>7} {:>6} {:>6} {:>14}", "eta", "n", "m", "terms", "factor");
    for (eta, n) in [(0.01, 2000), (0.02, 2000), (0.02, 20000)] {
        let t = Instant::now();
        let s = theta_n_series(n, eta, 0.0, FRAC_PI_2, opts)?;
        println!(
            "{:>6} {:>7} {:>6} {:>6} {:>14.10} ({:.0?})",
            eta,
            n,
            s.converged_at,
            s.terms,
            s.factor,
            t.elapsed()
        );
    }

    println!("\nseries vs closed form at eta = 0.02");
    for n in [0u64, 10, 100, 1000, 10000] {
        let s = theta_n_series(n, 0.02, 0.0, 1.0, SeriesOptions::default())?;
        let c = theta_n_aligned(n, 0.02, 1.0);
        println!("  n = {n:>5}: {:.12} {:.12} rel {:.1e}", s.value, c, ((s.value - c) / c).abs());
    }

    let misaligned = ThetaTable::new(400, 0.02, 0.3)?;
    let aligned = ThetaTable::new(400, 0.02, 0.0)?;
    println!("\nxi = 0.3 shifts the n = 400 factor by {:.3e}", misaligned.factor(400) - aligned.factor(400));
    Ok(())
}
