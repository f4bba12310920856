//! Instance files, the staged pipeline and its report.

mod instance;
mod pipeline;
mod report;

use thiserror::Error;

use crate::lp::UtilityError;
use crate::milp::MilpError;
use crate::model::ModelError;
use crate::symmetry::SymmetryError;

pub use instance::{emit_instance, parse_instance};
pub use pipeline::{run_pipeline, Format, PipelineRun, RunConfig, Stage};
pub use report::{
    BlockReport, ClassReport, ConfigEcho, DutyEntry, FcpClasses, GroupReport, InstanceSummary, OptimumReport, Report,
    SbcReport, SymmetryReport, UtilityReport,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("{}{}: {message}", line.map(|l| format!("line {l}")).unwrap_or_else(|| "input".into()), if field.is_empty() { String::new() } else { format!(", field `{field}`") })]
    Parse {
        line: Option<usize>,
        field: String,
        message: String,
    },
    #[error("invalid instance: {0}")]
    Validation(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StageError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Utility(#[from] UtilityError),
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error("{0}")]
    Config(String),
}

/// A failed pipeline stage.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("stage `{stage}` failed: {error}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub error: StageError,
}

impl PipelineError {
    /// Process exit code: 2 infeasible, 3 parse or validation, 4 resource limit, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            StageError::Utility(UtilityError::Infeasible) | StageError::Milp(MilpError::Infeasible) => 2,
            StageError::Instance(_) | StageError::Model(_) | StageError::Config(_) => 3,
            StageError::Milp(MilpError::Model(_)) | StageError::Milp(MilpError::MissingDuty(_)) => 3,
            StageError::Milp(MilpError::NodeLimit(_)) => 4,
            _ => 1,
        }
    }
}
