//! Experiment configuration loaded from TOML.
//!
//! Every key is optional. An empty file gives the full default grid:
//! three scenarios, five trust models, 100 runs per cell.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use sartrust_core::allocation::{AllocationConfig, QLearningConfig, RewardConfig};
use sartrust_core::engine::{EngineConfig, ScenarioName, SimConfig};
use sartrust_core::environment::EnvConfig;
use sartrust_core::trust::{EctConfig, GuoYangConfig, ModelConfigs, MonirConfig, TrustModelKind, XuDudekConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write one JSONL trace per episode under `steps/`.
    pub step_log: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("results"), step_log: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenarios: Vec<ScenarioName>,
    pub models: Vec<TrustModelKind>,
    pub runs_per_cell: u32,
    pub base_seed: u64,
    pub environment: EnvConfig,
    pub monir: MonirConfig,
    pub xu_dudek: XuDudekConfig,
    pub guo_yang: GuoYangConfig,
    pub ect: EctConfig,
    pub q_learning: QLearningConfig,
    pub reward: RewardConfig,
    pub allocation: AllocationConfig,
    pub engine: EngineConfig,
    // Left out of the echo in summary.json: where results land does not
    // change what they are.
    #[serde(skip_serializing)]
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let sim = SimConfig::default();
        Self {
            scenarios: ScenarioName::ALL.to_vec(),
            models: TrustModelKind::ALL.to_vec(),
            runs_per_cell: 100,
            base_seed: 0,
            environment: sim.env,
            monir: sim.models.monir,
            xu_dudek: sim.models.xu_dudek,
            guo_yang: sim.models.guo_yang,
            ect: sim.models.ect,
            q_learning: sim.q_learning,
            reward: sim.reward,
            allocation: sim.allocation,
            engine: sim.engine,
            output: OutputConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            env: self.environment,
            models: ModelConfigs { monir: self.monir, xu_dudek: self.xu_dudek, guo_yang: self.guo_yang, ect: self.ect },
            q_learning: self.q_learning,
            reward: self.reward,
            allocation: self.allocation,
            engine: self.engine,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid =
            |field: &str, message: &str| ConfigError::Invalid { field: field.into(), message: message.into() };
        if self.runs_per_cell == 0 {
            return Err(invalid("runs_per_cell", "must be at least 1"));
        }
        if self.scenarios.is_empty() {
            return Err(invalid("scenarios", "must name at least one scenario"));
        }
        if self.models.is_empty() {
            return Err(invalid("models", "must name at least one model"));
        }
        if self.scenarios.iter().collect::<HashSet<_>>().len() != self.scenarios.len() {
            return Err(invalid("scenarios", "contains duplicates"));
        }
        if self.models.iter().collect::<HashSet<_>>().len() != self.models.len() {
            return Err(invalid("models", "contains duplicates"));
        }
        self.sim_config()
            .validate()
            .map_err(|e| ConfigError::Invalid { field: "simulation".into(), message: e.to_string() })
    }

    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::parse(text)
            .map_err(|e| ConfigError::Parse { path: origin.to_path_buf(), message: e.to_string() })?;
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            path: origin.to_path_buf(),
            message: format!("at `{}`: {}", e.path(), e.inner()),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    ExperimentConfig::from_toml_str(&text, path)
}
