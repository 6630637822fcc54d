use crate::output::Artifact;
use crg_core::{AnalyticError, CoveringError, GrowthError, ModelError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, malformed spec or input file. Exit code 1.
    #[error("{0}")]
    Usage(String),
    /// Overflow, zero hits or non-convergence dominating the result. Exit code 2.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// A certificate or audit did not hold. Exit code 3. Artifacts computed
    /// before the failure are kept so they can still be inspected.
    #[error("audit failure: {message}")]
    Audit { message: String, artifacts: Vec<Artifact> },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Audit { .. } => 3,
        }
    }

    pub fn audit(message: impl Into<String>) -> Self {
        CliError::Audit {
            message: message.into(),
            artifacts: Vec::new(),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Invalid(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<GrowthError> for CliError {
    fn from(e: GrowthError) -> Self {
        match e {
            GrowthError::Model(m) => m.into(),
            GrowthError::AllSamplesHitZeros { .. } => CliError::Numeric(e.to_string()),
            GrowthError::NonpositiveInterior { .. } => CliError::audit(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        match e {
            AnalyticError::Model(m) => m.into(),
            AnalyticError::HypothesisFailure { .. } => CliError::audit(e.to_string()),
            AnalyticError::SectorViolation { .. }
            | AnalyticError::BandViolation { .. }
            | AnalyticError::BranchViolation { .. }
            | AnalyticError::NotInRegime { .. }
            | AnalyticError::Invalid(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<CoveringError> for CliError {
    fn from(e: CoveringError) -> Self {
        match e {
            CoveringError::CertificateFailure(_) => CliError::audit(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}
