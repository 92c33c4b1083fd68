//! Matrix-exponential evolution on qubit ⊗ Fock space against sin²Θ_n.

use ionlight::dynamics::{brute_force_evolve, theta_n, OracleFrame, OracleParams};

fn main() -> ionlight::Result<()> {
    let omega_t = 1.3;
    for xi in [0.0, 0.2] {
        let p = OracleParams {
            eta: 0.05,
            xi,
            omega_t,
            n_max: 120,
            order_cap: 40,
            frame: OracleFrame::RotatingWave,
        };
        let probs = brute_force_evolve(&p)?;
        let worst = (0..=50)
            .map(|n| {
                let t = theta_n(n as u64, p.eta, xi, omega_t)?;
                Ok((probs[n] - t.sin().powi(2)).abs())
            })
            .collect::<ionlight::Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("xi = {xi}: max |P_oracle - sin^2 Theta_n| over n <= 50 = {worst:.2e}");
    }

    // Off-resonant couplings included: the mode energy detunes them away.
    let full = OracleParams {
        eta: 0.05,
        xi: 0.2,
        omega_t,
        n_max: 60,
        order_cap: 20,
        frame: OracleFrame::Full { mode_frequency_ratio: 50.0 },
    };
    let probs = brute_force_evolve(&full)?;
    let t = theta_n(10, 0.05, 0.2, omega_t)?;
    println!("full frame, n = 10: {:.6} vs {:.6}", probs[10], t.sin().powi(2));
    Ok(())
}
