//! Batch experiment runner behind the `kahlerq` binary.

mod config;
mod plot;
mod report;
mod run;
mod schema;

use std::path::PathBuf;

use crate::error::KahlerError;

pub use config::{
    CommutatorParams, ErgodicParams, EvolveParams, EvolveTolerances, ExperimentConfig, GridParams, GridSpec, Kind,
    LiftParams, PacketSpec, Params, TensorParams, ValidateParams,
};
pub use plot::emit_plot_data;
pub use report::{CheckResult, RunReport, ARTIFACT_VERSION, REPORT_FILE};
pub use run::{budget_from_env, run, run_config, RunOutcome, BUDGET_ENV, DEFAULT_OUTPUT_DIR};
pub use schema::config_schema;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("no report.json in {}", .0.display())]
    MissingReport(PathBuf),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("computation failed: {0}")]
    Compute(KahlerError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Compute(_) => EXIT_CHECK_FAILURE,
            CliError::Config(_) | CliError::MissingReport(_) | CliError::Io { .. } => EXIT_CONFIG,
        }
    }

    /// Classifies a library error raised while building inputs from a config.
    pub(crate) fn invalid(e: KahlerError) -> Self {
        match e {
            KahlerError::SearchSpaceTooLarge { .. } => CliError::Budget(e.to_string()),
            KahlerError::InvalidArgument(_)
            | KahlerError::DimensionMismatch { .. }
            | KahlerError::NotHermitian { .. }
            | KahlerError::NotNormalized { .. }
            | KahlerError::BoundarySupport { .. } => CliError::Config(e.to_string()),
            other => CliError::Compute(other),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<KahlerError> for CliError {
    fn from(e: KahlerError) -> Self {
        CliError::invalid(e)
    }
}
