//! Run configuration: command-line flags over a TOML file over defaults.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use tbill_impact::dataset::{FirstPeriod, Variable};
use tbill_impact::threshold::{CandidateGrid, ThresholdSpec};

use crate::error::CliError;

pub const OUTPUT_DIR_ENV: &str = "TBILL_IMPACT_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "tbill-impact-output";
pub const DEFAULT_REPLICATIONS: usize = 500;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIM: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum ResponseChoice {
    #[value(name = "1m")]
    #[serde(rename = "1m")]
    OneMonth,
    #[value(name = "3m")]
    #[serde(rename = "3m")]
    ThreeMonth,
    #[serde(rename = "both")]
    Both,
}

impl ResponseChoice {
    pub fn variables(self) -> Vec<Variable> {
        match self {
            ResponseChoice::OneMonth => vec![Variable::LogYield1m],
            ResponseChoice::ThreeMonth => vec![Variable::LogYield3m],
            ResponseChoice::Both => vec![Variable::LogYield1m, Variable::LogYield3m],
        }
    }
}

/// File-name tag of a response.
pub fn tag(response: Variable) -> &'static str {
    match response {
        Variable::LogYield3m => "3m",
        _ => "1m",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Baseline,
    Threshold,
    Both,
}

impl ModelChoice {
    pub fn baseline(self) -> bool {
        matches!(self, ModelChoice::Baseline | ModelChoice::Both)
    }

    pub fn threshold(self) -> bool {
        matches!(self, ModelChoice::Threshold | ModelChoice::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Svg,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FirstPeriodChoice {
    Backfill,
    Drop,
}

impl From<FirstPeriodChoice> for FirstPeriod {
    fn from(c: FirstPeriodChoice) -> Self {
        match c {
            FirstPeriodChoice::Backfill => FirstPeriod::Backfill,
            FirstPeriodChoice::Drop => FirstPeriod::Drop,
        }
    }
}

/// Keys accepted in a config file; all optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub response: Option<ResponseChoice>,
    pub model: Option<ModelChoice>,
    pub trim_fraction: Option<f64>,
    pub refined_grid: Option<bool>,
    pub include_intercept_shift: Option<bool>,
    pub replications: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
    pub first_period: Option<FirstPeriodChoice>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }
}

/// Flag values; `None` means not given on the command line.
#[derive(Debug, Default, Clone)]
pub struct FlagConfig {
    pub response: Option<ResponseChoice>,
    pub model: Option<ModelChoice>,
    pub trim_fraction: Option<f64>,
    pub refined_grid: Option<bool>,
    pub include_intercept_shift: Option<bool>,
    pub replications: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
    pub first_period: Option<FirstPeriodChoice>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub response: ResponseChoice,
    pub model: ModelChoice,
    pub trim_fraction: f64,
    pub refined_grid: bool,
    pub include_intercept_shift: bool,
    pub replications: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub formats: BTreeSet<Format>,
    pub first_period: FirstPeriod,
    pub threads: Option<usize>,
}

impl RunConfig {
    /// `env_output_dir` is the value of [`OUTPUT_DIR_ENV`], consulted only
    /// when neither flags nor file name an output directory.
    pub fn resolve(
        input_path: PathBuf,
        flags: FlagConfig,
        file: FileConfig,
        env_output_dir: Option<PathBuf>,
    ) -> Result<Self, CliError> {
        let formats = flags.formats.or(file.formats).unwrap_or_else(|| Format::value_variants().to_vec());
        let cfg = RunConfig {
            input_path,
            response: flags.response.or(file.response).unwrap_or(ResponseChoice::Both),
            model: flags.model.or(file.model).unwrap_or(ModelChoice::Both),
            trim_fraction: flags.trim_fraction.or(file.trim_fraction).unwrap_or(DEFAULT_TRIM),
            refined_grid: flags.refined_grid.or(file.refined_grid).unwrap_or(true),
            include_intercept_shift: flags.include_intercept_shift.or(file.include_intercept_shift).unwrap_or(true),
            replications: flags.replications.or(file.replications).unwrap_or(DEFAULT_REPLICATIONS),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            output_dir: flags
                .output_dir
                .or(file.output_dir)
                .or(env_output_dir)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
            formats: formats.into_iter().collect(),
            first_period: flags.first_period.or(file.first_period).map(Into::into).unwrap_or_default(),
            threads: flags.threads.or(file.threads),
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        if self.model.threshold() && self.replications == 0 {
            return Err(CliError::Validation("replications must be at least 1 for threshold models".into()));
        }
        if !(0.0..0.5).contains(&self.trim_fraction) {
            return Err(CliError::Validation(format!("trim_fraction must lie in [0, 0.5), got {}", self.trim_fraction)));
        }
        if self.threads == Some(0) {
            return Err(CliError::Validation("threads must be at least 1".into()));
        }
        if self.formats.is_empty() {
            return Err(CliError::Validation("at least one output format is required".into()));
        }
        Ok(())
    }

    pub fn threshold_spec(&self) -> ThresholdSpec<f64> {
        ThresholdSpec {
            threshold_variable: Variable::MarketShare,
            trim_fraction: self.trim_fraction,
            include_intercept_shift: self.include_intercept_shift,
            candidate_grid: if self.refined_grid { CandidateGrid::Refined } else { CandidateGrid::Observed },
        }
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::resolve("p.csv".into(), FlagConfig::default(), FileConfig::default(), None).unwrap();
        assert_eq!(c.replications, 500);
        assert!(c.include_intercept_shift && c.refined_grid);
        assert_eq!(c.trim_fraction, 0.15);
        assert_eq!(c.output_dir, PathBuf::from(DEFAULT_OUTPUT_DIR));
        assert_eq!(c.formats.len(), 4);
    }

    #[test]
    fn flags_beat_file_beats_env() {
        let file: FileConfig =
            toml::from_str("replications = 50\nseed = 3\noutput_dir = \"from-file\"\nrefined_grid = false").unwrap();
        let flags = FlagConfig { replications: Some(9), ..FlagConfig::default() };
        let c = RunConfig::resolve("p.csv".into(), flags, file.clone(), Some("from-env".into())).unwrap();
        assert_eq!(c.replications, 9);
        assert_eq!(c.seed, 3);
        assert!(!c.refined_grid);
        assert_eq!(c.output_dir, PathBuf::from("from-file"));
        let no_dir = FileConfig { output_dir: None, ..file };
        let c = RunConfig::resolve("p.csv".into(), FlagConfig::default(), no_dir, Some("from-env".into())).unwrap();
        assert_eq!(c.output_dir, PathBuf::from("from-env"));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(toml::from_str::<FileConfig>("replicates = 5").is_err());
        let file: FileConfig = toml::from_str("replications = 0\nresponse = \"3m\"").unwrap();
        assert_eq!(file.response, Some(ResponseChoice::ThreeMonth));
        assert!(RunConfig::resolve("p".into(), FlagConfig::default(), file, None).is_err());
    }
}
