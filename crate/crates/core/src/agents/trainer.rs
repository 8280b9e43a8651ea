use std::path::Path;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{build_agent, select_action, Agent, AgentCheckpoint, AgentConfig, Algorithm};
use crate::checkpoint;
use crate::envs::{EnvSpec, Environment};
use crate::error::{Error, Result};
use crate::replay::{ReplayBuffer, Transition};
use crate::rng::{stream_rng, StreamRng};

/// Outcome of one training episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    /// Zero-based, strictly increasing within a stream.
    pub episode: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    /// Sum of the unclipped environment rewards.
    pub raw_return: f64,
    pub steps: usize,
    /// Environment actions taken by this stream so far, this episode included.
    pub total_actions: u64,
    pub train_steps: u64,
    #[serde(skip)]
    pub duration_secs: f64,
}

/// One agent, its replay memory and exploration state, trained one episode
/// at a time.
pub struct Trainer {
    config: AgentConfig,
    agent: Box<dyn Agent>,
    replay: Option<ReplayBuffer>,
    explore_rng: StreamRng,
    episode_rng: StreamRng,
    seed: u64,
    total_actions: u64,
    experiences: u64,
    episodes: usize,
}

impl Trainer {
    /// `seed` labels the stream in records; all randomness (network
    /// initialization, replay sampling, exploration, episode starts) is
    /// derived from `stream_seed`.
    pub fn new(config: AgentConfig, spec: &EnvSpec, seed: u64, stream_seed: u64) -> Result<Self> {
        config.validate()?;
        let mut master = stream_rng(stream_seed);
        let mut init_rng = stream_rng(master.gen());
        let agent = build_agent(&config, spec.observation_dim, spec.action_count, &mut init_rng)?;
        let replay_seed: u64 = master.gen();
        let replay = config
            .replay
            .map(|r| ReplayBuffer::new(r.capacity, r.warmup, replay_seed))
            .transpose()?;
        Ok(Trainer {
            config,
            agent,
            replay,
            explore_rng: stream_rng(master.gen()),
            episode_rng: stream_rng(master.gen()),
            seed,
            total_actions: 0,
            experiences: 0,
            episodes: 0,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn agent(&self) -> &dyn Agent {
        self.agent.as_ref()
    }

    pub fn agent_mut(&mut self) -> &mut dyn Agent {
        self.agent.as_mut()
    }

    pub fn replay(&self) -> Option<&ReplayBuffer> {
        self.replay.as_ref()
    }

    pub fn total_actions(&self) -> u64 {
        self.total_actions
    }

    /// Transitions produced so far (`total_e`).
    pub fn experiences(&self) -> u64 {
        self.experiences
    }

    pub fn episodes(&self) -> usize {
        self.episodes
    }

    pub fn epsilon(&self) -> f64 {
        self.config.epsilon_at(self.total_actions)
    }

    /// Plays one episode from a fresh reset: act ε-greedily, clip and store
    /// the transition, then (once the replay warmup is met) take exactly one
    /// training step per action. Without replay every step trains on the
    /// transition just observed.
    pub fn run_episode(&mut self, env: &mut dyn Environment) -> Result<EpisodeRecord> {
        let started = Instant::now();
        let train_before = self.agent.train_steps();
        let mut observation = env.reset(self.episode_rng.gen());
        let mut raw_return = 0.0;
        let mut steps = 0;
        loop {
            let epsilon = self.config.epsilon_at(self.total_actions);
            let action = select_action(self.agent.as_ref(), &observation, epsilon, &mut self.explore_rng)?;
            let result = env.step(action)?;
            self.total_actions += 1;
            steps += 1;
            raw_return += result.reward;

            let reward = if self.config.clip_rewards {
                result.reward.clamp(-1.0, 1.0)
            } else {
                result.reward
            };
            let transition = Transition {
                state: std::mem::take(&mut observation),
                action,
                reward,
                next_state: result.observation.clone(),
                terminal: result.terminal,
            };
            self.experiences += 1;

            match (&mut self.replay, self.config.replay) {
                (Some(buffer), Some(replay)) => {
                    buffer.push(transition);
                    if buffer.ready() {
                        let batch = buffer.sample(replay.batch)?;
                        self.agent.train_on_batch(&batch)?;
                    }
                }
                _ => {
                    self.agent.train_on_batch(&[&transition])?;
                }
            }

            let done = result.done();
            observation = result.observation;
            if done {
                break;
            }
        }

        let record = EpisodeRecord {
            episode: self.episodes,
            seed: self.seed,
            algorithm: self.agent.algorithm(),
            raw_return,
            steps,
            total_actions: self.total_actions,
            train_steps: self.agent.train_steps() - train_before,
            duration_secs: started.elapsed().as_secs_f64(),
        };
        self.episodes += 1;
        Ok(record)
    }

    pub fn checkpoint(&self) -> TrainerCheckpoint {
        TrainerCheckpoint {
            config: self.config.clone(),
            agent: self.agent.checkpoint(),
            replay: self.replay.clone(),
            explore_rng: self.explore_rng.clone(),
            episode_rng: self.episode_rng.clone(),
            seed: self.seed,
            total_actions: self.total_actions,
            experiences: self.experiences,
            episodes: self.episodes,
        }
    }

    pub fn from_checkpoint(ckpt: TrainerCheckpoint) -> Result<Self> {
        ckpt.config.validate()?;
        if ckpt.agent.algorithm != ckpt.config.algorithm {
            return Err(Error::Checkpoint("agent and config disagree on the algorithm".into()));
        }
        if ckpt.replay.is_some() != ckpt.config.replay.is_some() {
            return Err(Error::Checkpoint("replay state does not match the config".into()));
        }
        Ok(Trainer {
            config: ckpt.config,
            agent: ckpt.agent.into_agent()?,
            replay: ckpt.replay,
            explore_rng: ckpt.explore_rng,
            episode_rng: ckpt.episode_rng,
            seed: ckpt.seed,
            total_actions: ckpt.total_actions,
            experiences: ckpt.experiences,
            episodes: ckpt.episodes,
        })
    }
}

pub const TRAINER_CHECKPOINT_FORMAT: &str = "dqv-trainer";

/// Everything needed to resume a training stream exactly where it stopped.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainerCheckpoint {
    pub config: AgentConfig,
    pub agent: AgentCheckpoint,
    pub replay: Option<ReplayBuffer>,
    explore_rng: StreamRng,
    episode_rng: StreamRng,
    pub seed: u64,
    pub total_actions: u64,
    pub experiences: u64,
    pub episodes: usize,
}

impl TrainerCheckpoint {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        checkpoint::save(path, TRAINER_CHECKPOINT_FORMAT, self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        checkpoint::load(path, TRAINER_CHECKPOINT_FORMAT)
    }
}
