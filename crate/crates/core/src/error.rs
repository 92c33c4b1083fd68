use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical input violates a precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    /// An iterative procedure hit its iteration cap.
    #[error("{what} did not converge after {iterations} iterations (last value {partial})")]
    NonConvergence {
        what: String,
        iterations: usize,
        partial: f64,
    },

    /// The sampled objective did not bracket a single maximum.
    #[error("bracket failure: {0}")]
    Bracket(String),

    /// The ion chain is not a stable linear crystal for the requested frequencies.
    #[error("unstable chain configuration: {0}")]
    Unstable(String),

    /// A requested operator power does not fit into the truncated space.
    #[error("power {power} does not fit a Fock space of dimension {dim}")]
    CutoffOverflow { power: usize, dim: usize },

    /// Scenario file problems; `path` is the dotted key path.
    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    /// Tabular data problems.
    #[error("data error{}: {reason}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Data { line: Option<u64>, reason: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: &str, reason: impl Into<String>) -> Self {
        Error::Config {
            path: path.to_string(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } | Error::Bracket(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
