//! Pipeline configuration: a TOML file with environment-variable and CLI
//! overrides, plus the content digest recorded in output manifests.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::backend::BackendConfig;
use crate::compose::ComposeStyle;
use crate::jsonl::sha256_hex;
use crate::repo_filter::IecConfig;

/// Optional network engines, one per endpoint. All absent (the default)
/// means hermetic mode: deterministic local baselines everywhere.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BackendsConfig {
    pub generation: Option<BackendConfig>,
    pub classification: Option<BackendConfig>,
    pub type_service: Option<BackendConfig>,
}

impl BackendsConfig {
    pub fn any_configured(&self) -> bool {
        self.generation.is_some() || self.classification.is_some() || self.type_service.is_some()
    }
}

/// Everything the subcommands need, loadable from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub corpus_root: PathBuf,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub train_fraction: f64,
    pub iec: IecConfig,
    pub backends: BackendsConfig,
    /// Rendered docstring convention; ReST is the tested default.
    pub compose_style: ComposeStyle,
    /// Extra abbreviation guards for sentence splitting (e.g. "approx.").
    pub extra_abbreviations: Vec<String>,
    /// Fraction of malformed metadata lines tolerated before a nonzero exit.
    pub malformed_threshold: f64,
    /// Fraction of per-function generation failures tolerated likewise.
    pub generation_failure_threshold: f64,
    /// BLEU smoothing epsilon; absent = unsmoothed (the cited original).
    pub bleu_epsilon: Option<f64>,
    /// Worker threads for per-file/per-function stages; absent = all cores.
    pub workers: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus_root: PathBuf::from("corpus"),
            output_dir: PathBuf::from("out"),
            seed: 42,
            train_fraction: 0.8,
            iec: IecConfig::default(),
            backends: BackendsConfig::default(),
            compose_style: ComposeStyle::Rest,
            extra_abbreviations: Vec::new(),
            malformed_threshold: 0.01,
            generation_failure_threshold: 0.10,
            bleu_epsilon: None,
            workers: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    Parse {
        path: String,
        source: Box<toml::de::Error>,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl PipelineConfig {
    /// Load from TOML and apply environment overrides.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut config: PipelineConfig =
            toml::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.display().to_string(),
                source: Box::new(source),
            })?;
        config.apply_env_overrides();
        config.validate()?;
        Ok(config)
    }

    /// Overlay `DOCFORGE_BACKEND_URL` / `DOCFORGE_BACKEND_TOKEN` onto every
    /// configured backend.
    pub fn apply_env_overrides(&mut self) {
        for backend in [
            &mut self.backends.generation,
            &mut self.backends.classification,
            &mut self.backends.type_service,
        ]
        .into_iter()
        .flatten()
        {
            backend.apply_env_overrides();
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "train_fraction must lie strictly between 0 and 1, got {}",
                self.train_fraction
            )));
        }
        for (name, value) in [
            ("malformed_threshold", self.malformed_threshold),
            (
                "generation_failure_threshold",
                self.generation_failure_threshold,
            ),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Invalid(format!(
                    "{name} must lie within [0, 1], got {value}"
                )));
            }
        }
        if let Some(eps) = self.bleu_epsilon {
            if !(eps > 0.0) {
                return Err(ConfigError::Invalid(format!(
                    "bleu_epsilon must be positive, got {eps}"
                )));
            }
        }
        Ok(())
    }

    /// Content digest of the effective configuration, recorded in every
    /// manifest so reruns can prove they used identical settings.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        sha256_hex(canonical.as_bytes())
    }
}
