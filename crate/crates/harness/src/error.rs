use germcalc_core::{GermError, ParseError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Germ(#[from] GermError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl HarnessError {
    /// Name of the originating error, printed on standard error by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            HarnessError::Germ(e) => e.name(),
            HarnessError::Parse(e) => e.name(),
            HarnessError::UnknownScenario(_) => "UnknownScenario",
            HarnessError::Io { .. } => "Io",
            HarnessError::Usage(_) => "Usage",
        }
    }

    /// Usage errors exit with status 2, everything else with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::UnknownScenario(_) | HarnessError::Usage(_) => 2,
            _ => 1,
        }
    }
}
