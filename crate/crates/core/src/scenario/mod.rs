//! Scenario files and the runs behind the command-line tool.

mod config;
mod output;
mod runs;

pub use config::{
    AddressingSection, BeamSection, FitSection, GridSection, GridVariable, ModeChoice, ModeEntry, NamedMode,
    NbarSource, PointSection, Prepared, RunSection, ScenarioConfig, SequenceKind, Species, TrapSection,
    TruncationSection, CONFIG_VERSION,
};
pub use output::{build_id, config_hash, read_metadata, verify_config_hash, CurveOutput};
pub use runs::{
    read_delay_table, run_delayed_gate, run_fit, run_power_law, run_truncation_report, write_truncation_csv,
    FitReport, PowerLawConfig, PowerLawPoint, PowerLawReport,
};
