use serde::{Deserialize, Serialize};

use super::{argmax, DiscreteTransition};
use crate::error::{Error, Result};

/// Dense state-action value table for one-step Q-learning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    num_states: usize,
    num_actions: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn new(num_states: usize, num_actions: usize) -> Self {
        QTable {
            num_states,
            num_actions,
            values: vec![0.0; num_states * num_actions],
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.num_actions + action]
    }

    pub fn fill(&mut self, value: f64) {
        self.values.fill(value);
    }

    pub fn set(&mut self, state: usize, action: usize, value: f64) {
        self.values[state * self.num_actions + action] = value;
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.values[state * self.num_actions..(state + 1) * self.num_actions]
    }

    pub fn max(&self, state: usize) -> f64 {
        self.row(state)
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn greedy_action(&self, state: usize) -> usize {
        argmax(self.row(state))
    }

    pub fn greedy_policy(&self) -> Vec<usize> {
        (0..self.num_states).map(|s| self.greedy_action(s)).collect()
    }

    /// `Q(s,a) += α [r + γ max_a' Q(s',a') − Q(s,a)]`, with the max term
    /// dropped for terminal `s'`.
    pub fn q_learning_step(&mut self, t: &DiscreteTransition, alpha: f64, gamma: f64) -> Result<()> {
        if t.state >= self.num_states || t.next_state >= self.num_states {
            return Err(Error::contract(format!(
                "state index out of range for {} states: {t:?}",
                self.num_states
            )));
        }
        if t.action >= self.num_actions {
            return Err(Error::contract(format!(
                "action {} out of range for {} actions",
                t.action, self.num_actions
            )));
        }
        let bootstrap = if t.terminal {
            0.0
        } else {
            gamma * self.max(t.next_state)
        };
        let i = t.state * self.num_actions + t.action;
        self.values[i] += alpha * (t.reward + bootstrap - self.values[i]);
        Ok(())
    }
}
