use serde::Serialize;
use thiserror::Error;

use tbill_impact::analysis::AnalysisError;
use tbill_impact::dataset::DatasetError;
use tbill_impact::regress::RegressError;
use tbill_impact::synth::SimError;
use tbill_impact::threshold::ThresholdError;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VALIDATION: u8 = 2;
    pub const ESTIMATION: u8 = 3;
    pub const IO: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Estimation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => exit::VALIDATION,
            CliError::Estimation(_) => exit::ESTIMATION,
            CliError::Io(_) => exit::IO,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Estimation(_) => "estimation",
            CliError::Io(_) => "io",
        }
    }

    pub fn io(context: impl std::fmt::Display, err: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }

    /// Machine-readable form written to `error.json` and standard error.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            exit_code: u8,
            message: String,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        let w = Wrapper { error: Body { kind: self.kind(), exit_code: self.exit_code(), message: self.to_string() } };
        serde_json::to_string_pretty(&w).expect("error JSON serialises")
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<RegressError> for CliError {
    fn from(e: RegressError) -> Self {
        CliError::Estimation(e.to_string())
    }
}

impl From<ThresholdError> for CliError {
    fn from(e: ThresholdError) -> Self {
        match e {
            ThresholdError::InvalidSpec(_) | ThresholdError::NoReplications => CliError::Validation(e.to_string()),
            _ => CliError::Estimation(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Regress(_) | AnalysisError::NoFits | AnalysisError::MixedFitKinds { .. } => {
                CliError::Estimation(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(m) => CliError::Validation(m),
            SimError::Dataset(d) => d.into(),
        }
    }
}
