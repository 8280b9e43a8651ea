use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::OptimizerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Dqv,
    Dqn,
    Ddqn,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Dqv, Algorithm::Dqn, Algorithm::Ddqn];

    /// Stable id used for seed splitting; never reordered.
    pub fn id(self) -> u64 {
        match self {
            Algorithm::Dqv => 0,
            Algorithm::Dqn => 1,
            Algorithm::Ddqn => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Dqv => "dqv",
            Algorithm::Dqn => "dqn",
            Algorithm::Ddqn => "ddqn",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dqv" => Ok(Algorithm::Dqv),
            "dqn" => Ok(Algorithm::Dqn),
            "ddqn" => Ok(Algorithm::Ddqn),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayConfig {
    pub capacity: usize,
    /// Pushes required before the first training step.
    pub warmup: usize,
    pub batch: usize,
}

/// Named hyperparameter bundles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Replay of 200 transitions, batch 16, no target network.
    CartPole,
    /// Online updates on the current transition, no replay, no target network,
    /// Adam at 2e-4.
    Acrobot,
    /// Replay 400,000 / warmup 50,000 / batch 32, targets synced every 10,000
    /// training steps.
    Full,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cartpole" => Ok(Preset::CartPole),
            "acrobot" => Ok(Preset::Acrobot),
            "full" => Ok(Preset::Full),
            other => Err(Error::Config(format!("unknown preset {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub algorithm: Algorithm,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay_steps: u64,
    /// Training steps between target-network syncs; `None` bootstraps from
    /// the online networks directly.
    pub target_sync_period: Option<u64>,
    /// `None` trains online on each transition as it happens.
    pub replay: Option<ReplayConfig>,
    pub clip_rewards: bool,
    pub optimizer: OptimizerConfig,
    pub hidden_layers: Vec<usize>,
}

impl AgentConfig {
    pub fn preset(preset: Preset, algorithm: Algorithm) -> Self {
        let base = AgentConfig {
            algorithm,
            gamma: 0.99,
            epsilon_start: 0.5,
            epsilon_end: 0.1,
            epsilon_decay_steps: 10_000,
            target_sync_period: None,
            replay: None,
            clip_rewards: true,
            optimizer: OptimizerConfig::adam(1e-3),
            hidden_layers: vec![64, 64],
        };
        match preset {
            Preset::CartPole => AgentConfig {
                replay: Some(ReplayConfig {
                    capacity: 200,
                    warmup: 200,
                    batch: 16,
                }),
                ..base
            },
            // Online updates on correlated consecutive transitions diverge
            // at 1e-3; the smaller step keeps V from collapsing as often.
            Preset::Acrobot => AgentConfig {
                optimizer: OptimizerConfig::adam(2e-4),
                ..base
            },
            Preset::Full => AgentConfig {
                replay: Some(ReplayConfig {
                    capacity: 400_000,
                    warmup: 50_000,
                    batch: 32,
                }),
                target_sync_period: Some(10_000),
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("gamma {} outside [0, 1)", self.gamma));
        }
        if !(0.0 <= self.epsilon_end
            && self.epsilon_end <= self.epsilon_start
            && self.epsilon_start <= 1.0)
        {
            return bad(format!(
                "need 0 <= epsilon_end ({}) <= epsilon_start ({}) <= 1",
                self.epsilon_end, self.epsilon_start
            ));
        }
        if self.target_sync_period == Some(0) {
            return bad("target_sync_period must be at least 1".into());
        }
        if let Some(r) = &self.replay {
            if r.capacity == 0 || r.warmup == 0 || r.batch == 0 {
                return bad(format!("replay sizes must be positive: {r:?}"));
            }
            if r.batch > r.capacity {
                return bad(format!(
                    "batch {} larger than replay capacity {}",
                    r.batch, r.capacity
                ));
            }
            if r.batch > r.warmup {
                return bad(format!(
                    "batch {} larger than the warmup threshold {}; the first sample would come up short",
                    r.batch, r.warmup
                ));
            }
        }
        if self.hidden_layers.iter().any(|&w| w == 0) {
            return bad("hidden layer widths must be positive".into());
        }
        self.optimizer.validate()
    }

    /// Linear schedule from `epsilon_start` at step 0 to `epsilon_end` at
    /// `epsilon_decay_steps`, constant afterwards.
    pub fn epsilon_at(&self, step: u64) -> f64 {
        if self.epsilon_decay_steps == 0 || step >= self.epsilon_decay_steps {
            return self.epsilon_end;
        }
        let frac = step as f64 / self.epsilon_decay_steps as f64;
        self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)
    }

    pub fn layer_sizes(&self, input: usize, output: usize) -> Vec<usize> {
        let mut sizes = Vec::with_capacity(self.hidden_layers.len() + 2);
        sizes.push(input);
        sizes.extend_from_slice(&self.hidden_layers);
        sizes.push(output);
        sizes
    }
}
