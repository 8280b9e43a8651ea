//! Deep Quality-Value (DQV) learning and its relatives.
//!
//! DQV trains a state-value network V with temporal-difference targets and
//! regresses a separate state-action network Q onto the same targets
//! `r + γ V(s')`. The crate also carries the tabular QV(λ) algorithm, the
//! DQN / Double-DQN baselines, CartPole / Acrobot / gridworld simulators and
//! a multi-seed experiment harness.
//!
//! Module map:
//!
//! - [`nn`]: MLP, backpropagation, optimizers, gradient checking
//! - [`envs`]: simulators behind the [`envs::Environment`] trait
//! - [`tabular`]: QV(λ), tabular Q-learning, value iteration
//! - [`replay`]: FIFO experience replay with uniform sampling
//! - [`agents`]: DQV / DQN / DDQN agents and the training loop
//! - [`harness`]: experiment configs, record logging, smoothing, charts

pub mod agents;
pub mod checkpoint;
pub mod envs;
mod error;
pub mod harness;
pub mod nn;
pub mod replay;
pub mod rng;
pub mod tabular;

pub use error::{Error, Result};
