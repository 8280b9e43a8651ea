//! DQV, DQN and Double-DQN agents over MLP value functions, plus the
//! ε-greedy training loop that drives them.

mod config;
mod deep_q;
mod dqv;
mod trainer;

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::checkpoint;
use crate::error::{Error, Result};
use crate::nn::{Mlp, Optimizer};
use crate::replay::Transition;
use crate::tabular::argmax;

pub use config::{AgentConfig, Algorithm, Preset, ReplayConfig};
pub use deep_q::{ddqn_bootstrap, dqn_bootstrap, DeepQAgent};
pub use dqv::DqvAgent;
pub use trainer::{EpisodeRecord, Trainer, TrainerCheckpoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainStats {
    pub q_loss: f64,
    /// Only DQV trains a V network.
    pub v_loss: Option<f64>,
}

/// Counts training steps and fires every `period` of them.
///
/// Mirrors the `total_a` counter: incremented after each training step,
/// reset to zero when it reaches the period and the target is synced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSchedule {
    period: Option<u64>,
    since_sync: u64,
}

impl TargetSchedule {
    pub fn new(period: Option<u64>) -> Self {
        TargetSchedule {
            period,
            since_sync: 0,
        }
    }

    pub fn since_sync(&self) -> u64 {
        self.since_sync
    }

    /// Records one training step; true when a sync is due.
    pub fn tick(&mut self) -> bool {
        self.since_sync += 1;
        self.period == Some(self.since_sync)
    }

    pub fn reset(&mut self) {
        self.since_sync = 0;
    }
}

pub trait Agent: Send {
    fn algorithm(&self) -> Algorithm;

    /// Q network outputs, one per action.
    fn q_values(&self, observation: &[f64]) -> Result<Vec<f64>>;

    /// Computes bootstrap targets for `batch`, takes one optimizer step per
    /// network, then advances the target-sync counter.
    fn train_on_batch(&mut self, batch: &[&Transition]) -> Result<TrainStats>;

    /// Copies the online parameters into the target network (if any) and
    /// zeroes the sync counter.
    fn sync_target(&mut self) -> Result<()>;

    fn steps_since_sync(&self) -> u64;

    fn train_steps(&self) -> u64;

    fn checkpoint(&self) -> AgentCheckpoint;
}

/// ε-greedy action: uniform with probability `epsilon`, otherwise the
/// argmax of the Q outputs with ties going to the lowest index.
pub fn select_action<R: Rng + ?Sized>(
    agent: &dyn Agent,
    observation: &[f64],
    epsilon: f64,
    rng: &mut R,
) -> Result<usize> {
    let q = agent.q_values(observation)?;
    if epsilon > 0.0 && rng.gen_bool(epsilon.min(1.0)) {
        Ok(rng.gen_range(0..q.len()))
    } else {
        Ok(argmax(&q))
    }
}

pub fn build_agent<R: Rng + ?Sized>(
    config: &AgentConfig,
    observation_dim: usize,
    action_count: usize,
    rng: &mut R,
) -> Result<Box<dyn Agent>> {
    config.validate()?;
    Ok(match config.algorithm {
        Algorithm::Dqv => Box::new(DqvAgent::new(
            observation_dim,
            action_count,
            &config.hidden_layers,
            config.optimizer,
            config.gamma,
            config.target_sync_period,
            rng,
        )?),
        Algorithm::Dqn | Algorithm::Ddqn => Box::new(DeepQAgent::new(
            config.algorithm == Algorithm::Ddqn,
            observation_dim,
            action_count,
            &config.hidden_layers,
            config.optimizer,
            config.gamma,
            config.target_sync_period,
            rng,
        )?),
    })
}

pub const AGENT_CHECKPOINT_FORMAT: &str = "dqv-agent";

/// Networks, optimizer states and counters of an agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentCheckpoint {
    pub algorithm: Algorithm,
    pub gamma: f64,
    pub q_net: Mlp,
    pub q_optimizer: Optimizer,
    pub v_net: Option<Mlp>,
    pub v_optimizer: Option<Optimizer>,
    /// Φ⁻ for DQV, θ⁻ for DQN / DDQN.
    pub target: Option<Mlp>,
    pub schedule: TargetSchedule,
    pub train_steps: u64,
}

impl AgentCheckpoint {
    pub fn into_agent(self) -> Result<Box<dyn Agent>> {
        Ok(match self.algorithm {
            Algorithm::Dqv => Box::new(DqvAgent::restore(self)?),
            Algorithm::Dqn | Algorithm::Ddqn => Box::new(DeepQAgent::restore(self)?),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        checkpoint::save(path, AGENT_CHECKPOINT_FORMAT, self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let ckpt: AgentCheckpoint = checkpoint::load(path, AGENT_CHECKPOINT_FORMAT)?;
        if ckpt.algorithm == Algorithm::Dqv && ckpt.v_net.is_none() {
            return Err(Error::Checkpoint("DQV checkpoint lacks a V network".into()));
        }
        Ok(ckpt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn schedule_fires_every_period() {
        let mut s = TargetSchedule::new(Some(3));
        let fired: Vec<bool> = (0..7)
            .map(|_| {
                let due = s.tick();
                if due {
                    s.reset();
                }
                due
            })
            .collect();
        assert_eq!(fired, [false, false, true, false, false, true, false]);
        let mut never = TargetSchedule::new(None);
        assert!((0..100).all(|_| !never.tick()));
    }

    #[test]
    fn greedy_tie_goes_to_action_zero() {
        let agent = DeepQAgent::from_network(
            false,
            Mlp::zeros(&[2, 4, 3]).unwrap(),
            crate::nn::OptimizerConfig::sgd(0.1),
            0.9,
            None,
        );
        let mut rng = stream_rng(0);
        assert_eq!(select_action(&agent, &[0.3, 0.1], 0.0, &mut rng).unwrap(), 0);
    }
}
