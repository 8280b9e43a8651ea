//! Tabular QV(λ), tabular Q-learning, and value iteration over explicit
//! models.

mod model;
mod qlearning;
mod qv;
mod training;

pub use model::{value_iteration, value_iteration_capped, DpOracleResult, Outcome, TabularModel};
pub use qlearning::QTable;
pub use qv::{LearningRate, TabularValueStore, TRACE_CUTOFF};
pub use training::{
    greedy_path, policy_agreement, render_policy, render_values, train_gridworld, TabularAlgorithm, TabularRunConfig,
    TabularRunReport,
};

use serde::{Deserialize, Serialize};

/// One step of experience between discrete states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteTransition {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
    pub terminal: bool,
}

/// Index of the largest value, lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
