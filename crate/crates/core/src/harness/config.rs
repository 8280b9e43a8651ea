use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agents::{AgentConfig, Algorithm, Preset};
use crate::envs;
use crate::error::{Error, Result};

/// Environment variable naming the directory under which runs without an
/// explicit `output_dir` are written.
pub const OUTPUT_ROOT_VAR: &str = "DQV_OUTPUT_ROOT";
pub const DEFAULT_OUTPUT_ROOT: &str = "runs";

pub fn default_output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Smoothing {
    pub window: usize,
    pub order: usize,
}

impl Default for Smoothing {
    fn default() -> Self {
        Smoothing { window: 21, order: 3 }
    }
}

/// A multi-seed training campaign, usually read from TOML:
///
/// ```toml
/// env = "cartpole"
/// algorithms = ["dqv", "dqn", "ddqn"]
/// episodes = 1000
///
/// [agent]
/// hidden_layers = [64, 64]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Run name; the output directory defaults to `<output root>/<name>`.
    #[serde(default)]
    pub name: Option<String>,
    pub env: String,
    pub algorithms: Vec<Algorithm>,
    pub episodes: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub base_seed: u64,
    /// Defaults to the preset named after the environment (`cartpole` for
    /// environments without one).
    #[serde(default)]
    pub preset: Option<Preset>,
    /// Partial [`AgentConfig`] merged over the preset. An optional field
    /// set to `false` (`replay = false`, `target_sync_period = false`) is
    /// switched off.
    #[serde(default)]
    pub agent: toml::Table,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub smoothing: Smoothing,
    /// End a stream once its trailing-100 average reaches the environment's
    /// solve threshold instead of spending the whole episode budget.
    #[serde(default)]
    pub stop_on_solve: bool,
}

fn default_seeds() -> Vec<u64> {
    (0..5).collect()
}

impl ExperimentConfig {
    /// A config with every optional field at its default.
    pub fn new(env: &str, algorithms: &[Algorithm], episodes: usize) -> Self {
        ExperimentConfig {
            name: None,
            env: env.to_string(),
            algorithms: algorithms.to_vec(),
            episodes,
            seeds: default_seeds(),
            base_seed: 0,
            preset: None,
            agent: toml::Table::new(),
            output_dir: None,
            smoothing: Smoothing::default(),
            stop_on_solve: false,
        }
    }

    /// Parses TOML text, then applies `key=value` overrides (dotted keys,
    /// TOML values; anything that does not parse as TOML is a string).
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        let config: ExperimentConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>, overrides: &[String]) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, overrides).map_err(|e| match e {
            Error::Config(msg) => Error::parse(path, msg),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn preset(&self) -> Preset {
        self.preset.unwrap_or(match self.env.as_str() {
            "acrobot" => Preset::Acrobot,
            _ => Preset::CartPole,
        })
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| {
            default_output_root().join(self.name.as_deref().unwrap_or(&self.env))
        })
    }

    /// The preset for `algorithm` with the `[agent]` overrides applied.
    pub fn agent_config(&self, algorithm: Algorithm) -> Result<AgentConfig> {
        let preset = AgentConfig::preset(self.preset(), algorithm);
        let mut table = toml::Table::try_from(&preset).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut table, &self.agent);
        table.insert("algorithm".into(), toml::Value::String(algorithm.as_str().into()));
        let config: AgentConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("[agent]: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Everything that can be checked without training: ids, counts,
    /// smoothing parameters and the merged agent configs.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        envs::make(&self.env)?;
        if self.algorithms.is_empty() {
            return bad("at least one algorithm is required".into());
        }
        if self.episodes == 0 {
            return bad("the episode budget must be at least 1".into());
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        let mut seen = self.seeds.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.seeds.len() {
            return bad(format!("duplicate seeds in {:?}", self.seeds));
        }
        let mut algs = self.algorithms.clone();
        algs.sort_unstable();
        algs.dedup();
        if algs.len() != self.algorithms.len() {
            return bad(format!("duplicate algorithms in {:?}", self.algorithms));
        }
        let Smoothing { window, order } = self.smoothing;
        if window % 2 == 0 || window <= order {
            return bad(format!(
                "smoothing window must be odd and larger than the order, got window {window}, order {order}"
            ));
        }
        for &alg in &self.algorithms {
            self.agent_config(alg)?;
        }
        Ok(())
    }
}

/// Recursively overlays `patch` onto `base`. A patch table carrying `kind`
/// replaces the base table outright, since tagged variants do not share
/// fields; `false` over a table or integer removes the key.
fn merge(base: &mut toml::Table, patch: &toml::Table) {
    for (key, value) in patch {
        match (base.get_mut(key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(p)) if !p.contains_key("kind") => {
                merge(b, p)
            }
            (Some(toml::Value::Table(_) | toml::Value::Integer(_)), toml::Value::Boolean(false)) => {
                base.remove(key);
            }
            (None, toml::Value::Boolean(false)) if is_optional_agent_field(key) => {}
            _ => {
                base.insert(key.clone(), value.clone());
            }
        }
    }
}

fn is_optional_agent_field(key: &str) -> bool {
    matches!(key, "replay" | "target_sync_period")
}

/// Applies one `dotted.key=value` assignment to a TOML tree.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').map(str::trim).collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("override key {key:?} is malformed")));
    }
    let value = parse_value(raw.trim());
    let (last, parents) = path.split_last().expect("split yields at least one part");
    let mut node = table;
    for part in parents {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override {key:?}: {part:?} is not a table")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
