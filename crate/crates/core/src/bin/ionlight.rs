use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ionlight::scenario::{
    run_delayed_gate, run_fit, run_power_law, run_truncation_report, write_truncation_csv, ScenarioConfig,
};
use ionlight::{Error, Result};

#[derive(Parser)]
#[command(name = "ionlight", version, about = "Raman single-qubit gate modelling for trapped-ion chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// P↑ versus mean phonon number for static, optimised and composite gates.
    DelayedGate(Common),
    /// Keep/drop table of the field-factor expansions.
    TruncationReport(Common),
    /// Heating rate and readout offset from delayed-gate tables.
    Fit(Common),
    /// Power law of heating rate against mode frequency.
    PowerLaw(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// delayed-gate: thermal tail; truncation-report: threshold;
    /// fit: simplex diameter. Ignored by power-law.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn load(path: &Path) -> Result<(Vec<u8>, ScenarioConfig)> {
    let bytes = std::fs::read(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Error::Config {
        path: String::new(),
        reason: "config is not UTF-8".into(),
    })?;
    let cfg = ScenarioConfig::from_toml_str(text)?;
    Ok((bytes, cfg))
}

fn json(v: &impl serde::Serialize) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s.into_bytes()
}

fn run(cmd: Command) -> Result<()> {
    let (name, c) = match &cmd {
        Command::DelayedGate(c) => ("delayed-gate", c),
        Command::TruncationReport(c) => ("truncation-report", c),
        Command::Fit(c) => ("fit", c),
        Command::PowerLaw(c) => ("power-law", c),
    };
    let threads = c.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config {
            path: "--threads".into(),
            reason: e.to_string(),
        })?;
    log::info!("{name}: {} on {} threads", c.config.display(), pool.current_num_threads());
    let base = c.config.parent().map(Path::to_path_buf).unwrap_or_default();
    pool.install(|| match &cmd {
        Command::DelayedGate(c) => {
            let (bytes, mut cfg) = load(&c.config)?;
            if let Some(t) = c.tolerance {
                cfg.run.tail = t;
            }
            let out = run_delayed_gate(&cfg, &bytes)?;
            emit(&c.out, out.to_csv_string()?.as_bytes())
        }
        Command::TruncationReport(c) => {
            let (bytes, mut cfg) = load(&c.config)?;
            if let Some(t) = c.tolerance {
                cfg.truncation.threshold = t;
            }
            let report = run_truncation_report(&cfg)?;
            let mut buf = Vec::new();
            write_truncation_csv(&report, &bytes, &mut buf)?;
            emit(&c.out, &buf)
        }
        Command::Fit(c) => {
            let (bytes, cfg) = load(&c.config)?;
            let report = run_fit(&cfg, &bytes, &base, c.tolerance)?;
            emit(&c.out, &json(&report))
        }
        Command::PowerLaw(c) => {
            let text = std::fs::read_to_string(&c.config)?;
            let report = run_power_law(&text, &base)?;
            emit(&c.out, &json(&report))
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
