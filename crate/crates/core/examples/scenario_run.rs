//! Loads a scenario file and prints the delayed-gate table, as the
//! `delayed-gate` subcommand would.

use ionlight::scenario::{run_delayed_gate, ScenarioConfig};

fn main() -> ionlight::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/fig1_single_ion.toml").to_string());
    let bytes = std::fs::read(&path)?;
    let cfg = ScenarioConfig::from_toml_str(&String::from_utf8_lossy(&bytes))?;
    let prepared = cfg.prepare()?;
    eprintln!(
        "eta = {:.6}, xi = {:.3e}, nbar0 = {:.2}, {} grid points",
        prepared.eta,
        prepared.xi,
        prepared.nbar0,
        prepared.nbar_grid.len()
    );
    let out = run_delayed_gate(&cfg, &bytes)?;
    print!("{}", out.to_csv_string()?);
    Ok(())
}
