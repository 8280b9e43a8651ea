//! Episodic simulators with a discrete action set.

pub mod acrobot;
pub mod cartpole;
mod gridworld;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use acrobot::Acrobot;
pub use cartpole::CartPole;
pub use gridworld::{Cell, GridWorld, GridWorldConfig, ACTION_NAMES, DYNA_MAZE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvSpec {
    pub observation_dim: usize,
    pub action_count: usize,
    pub max_episode_steps: usize,
    /// Trailing-100-episode average return at which the harness calls the
    /// task solved. Reporting only.
    pub solve_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Vec<f64>,
    pub reward: f64,
    /// The dynamics ended the episode.
    pub terminal: bool,
    /// The step limit ended the episode. Never raised together with `terminal`.
    pub truncated: bool,
}

impl StepResult {
    pub fn done(&self) -> bool {
        self.terminal || self.truncated
    }
}

pub trait Environment: Send {
    fn name(&self) -> &'static str;

    fn spec(&self) -> &EnvSpec;

    /// Starts a new episode from an initial state drawn with `seed`.
    fn reset(&mut self, seed: u64) -> Vec<f64>;

    fn step(&mut self, action: usize) -> Result<StepResult>;

    fn observation(&self) -> Vec<f64>;
}

/// Step counter and end-of-episode bookkeeping shared by the simulators.
#[derive(Debug, Clone, Default)]
pub(crate) struct EpisodeClock {
    steps: usize,
    finished: bool,
}

impl EpisodeClock {
    pub(crate) fn reset(&mut self) {
        self.steps = 0;
        self.finished = false;
    }

    pub(crate) fn begin_step(&self, spec: &EnvSpec, action: usize) -> Result<()> {
        if self.finished {
            return Err(Error::contract("step called on a finished episode; call reset first"));
        }
        if action >= spec.action_count {
            return Err(Error::contract(format!(
                "action {action} out of range for {} actions",
                spec.action_count
            )));
        }
        Ok(())
    }

    /// Advances the counter and returns `(terminal, truncated)`.
    pub(crate) fn finish_step(&mut self, spec: &EnvSpec, terminal: bool) -> (bool, bool) {
        self.steps += 1;
        let truncated = !terminal && self.steps >= spec.max_episode_steps;
        self.finished = terminal || truncated;
        (terminal, truncated)
    }
}

/// Builds an environment from its id (`cartpole`, `acrobot`, `gridworld`).
pub fn make(id: &str) -> Result<Box<dyn Environment>> {
    match id {
        "cartpole" => Ok(Box::new(CartPole::new())),
        "acrobot" => Ok(Box::new(Acrobot::new())),
        "gridworld" => Ok(Box::new(GridWorld::dyna_maze())),
        other => Err(Error::Config(format!("unknown environment {other:?}"))),
    }
}

pub const ENV_IDS: [&str; 3] = ["cartpole", "acrobot", "gridworld"];
