//! The shared JSON configuration file.
//!
//! One file carries a section per pipeline stage; every field is optional
//! and falls back to the defaults below. Command-line flags override file
//! values. Unknown fields are rejected by name.

use crate::error::CliError;
use dockforge::denoiser::{Phase, PredictConfig, TrainConfig};
use dockforge::minidock::SearchConfig;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub gen_toy: GenToySection,
    pub gen_data: GenDataSection,
    /// minidock settings for `gen-data` and `screen`.
    pub search: SearchConfig,
    pub pretrain: TrainSection,
    pub finetune: TrainSection,
    pub predict: PredictConfig,
    pub screen: ScreenSection,
}

impl Default for ConfigFile {
    fn default() -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            gen_toy: GenToySection::default(),
            gen_data: GenDataSection::default(),
            search: SearchConfig::default(),
            pretrain: TrainSection::default(),
            finetune: TrainSection::default(),
            predict: PredictConfig::default(),
            screen: ScreenSection::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenToySection {
    pub n: usize,
}

impl Default for GenToySection {
    fn default() -> Self {
        Self { n: 16 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenDataSection {
    pub pairs: usize,
}

impl Default for GenDataSection {
    fn default() -> Self {
        Self { pairs: 64 }
    }
}

/// Training knobs shared by `pretrain` and `finetune`. `model_size` is
/// only used when no initial weights are given.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub model_size: usize,
    pub learning_rate: f64,
    pub warmup_steps: usize,
    pub batch_size: usize,
    pub steps: usize,
    pub log_every: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            model_size: 10_000,
            learning_rate: t.learning_rate,
            warmup_steps: t.warmup_steps,
            batch_size: t.batch_size,
            steps: t.steps,
            log_every: t.log_every,
        }
    }
}

impl TrainSection {
    pub fn to_train_config(&self, phase: Phase, rng_seed: u64, data_refs: Vec<String>) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            warmup_steps: self.warmup_steps,
            batch_size: self.batch_size,
            steps: self.steps,
            phase,
            rng_seed,
            log_every: self.log_every,
            data_refs,
            ..TrainConfig::default()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScreenSection {
    /// Fractions of the ranked library at which enrichment is reported.
    pub fractions: Vec<f64>,
}

impl Default for ScreenSection {
    fn default() -> Self {
        Self {
            fractions: vec![0.01, 0.05, 0.1],
        }
    }
}

pub fn load(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
    let cfg: ConfigFile = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
    if cfg.schema_version != CONFIG_SCHEMA_VERSION {
        return Err(CliError::Usage(format!(
            "invalid config: field `schema_version` is {}, expected {CONFIG_SCHEMA_VERSION}",
            cfg.schema_version
        )));
    }
    Ok(cfg)
}
