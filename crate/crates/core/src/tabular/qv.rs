use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{argmax, DiscreteTransition};
use crate::error::{Error, Result};

/// Traces that decay below this are dropped from the sparse trace map.
pub const TRACE_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearningRate {
    Constant(f64),
    /// `1 / n`, with `n` the visit count of the state (V) or state-action
    /// pair (Q) being updated, counting the current visit.
    InverseVisitCount,
    /// `n^-exponent` with the same visit counts; `exponent = 1` is
    /// [`LearningRate::InverseVisitCount`].
    Polynomial { exponent: f64 },
}

impl LearningRate {
    pub(crate) fn validate(&self) -> Result<()> {
        match *self {
            LearningRate::Constant(a) if !(a > 0.0 && a <= 1.0) => {
                Err(Error::Config(format!("learning rate {a} outside (0, 1]")))
            }
            LearningRate::Polynomial { exponent } if !(exponent > 0.5 && exponent <= 1.0) => {
                Err(Error::Config(format!("decay exponent {exponent} outside (0.5, 1]")))
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn at(&self, visits: u64) -> f64 {
        match *self {
            LearningRate::Constant(a) => a,
            LearningRate::InverseVisitCount => 1.0 / visits.max(1) as f64,
            LearningRate::Polynomial { exponent } => (visits.max(1) as f64).powf(-exponent),
        }
    }
}

/// Value tables and accumulating eligibility traces for QV(λ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabularValueStore {
    num_states: usize,
    num_actions: usize,
    v: Vec<f64>,
    q: Vec<f64>,
    traces: BTreeMap<usize, f64>,
    learning_rate: LearningRate,
    gamma: f64,
    lambda: f64,
    state_visits: Vec<u64>,
    pair_visits: Vec<u64>,
}

impl TabularValueStore {
    pub fn new(
        num_states: usize,
        num_actions: usize,
        learning_rate: LearningRate,
        gamma: f64,
        lambda: f64,
    ) -> Result<Self> {
        learning_rate.validate()?;
        if !(0.0..=1.0).contains(&gamma) || !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Config(format!(
                "gamma {gamma} and lambda {lambda} must lie in [0, 1]"
            )));
        }
        if num_states == 0 || num_actions == 0 {
            return Err(Error::Config("tables need at least one state and action".into()));
        }
        Ok(TabularValueStore {
            num_states,
            num_actions,
            v: vec![0.0; num_states],
            q: vec![0.0; num_states * num_actions],
            traces: BTreeMap::new(),
            learning_rate,
            gamma,
            lambda,
            state_visits: vec![0; num_states],
            pair_visits: vec![0; num_states * num_actions],
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn v(&self, state: usize) -> f64 {
        self.v[state]
    }

    pub fn q(&self, state: usize, action: usize) -> f64 {
        self.q[state * self.num_actions + action]
    }

    pub fn q_row(&self, state: usize) -> &[f64] {
        &self.q[state * self.num_actions..(state + 1) * self.num_actions]
    }

    pub fn v_table(&self) -> &[f64] {
        &self.v
    }

    /// Sets every V and Q entry to `value`.
    pub fn fill(&mut self, value: f64) {
        self.v.fill(value);
        self.q.fill(value);
    }

    pub fn set_v(&mut self, state: usize, value: f64) {
        self.v[state] = value;
    }

    pub fn set_q(&mut self, state: usize, action: usize, value: f64) {
        self.q[state * self.num_actions + action] = value;
    }

    /// Eligibility of `state`, zero when no trace is held.
    pub fn trace(&self, state: usize) -> f64 {
        self.traces.get(&state).copied().unwrap_or(0.0)
    }

    pub fn active_traces(&self) -> usize {
        self.traces.len()
    }

    pub fn greedy_action(&self, state: usize) -> usize {
        argmax(self.q_row(state))
    }

    pub fn greedy_policy(&self) -> Vec<usize> {
        (0..self.num_states).map(|s| self.greedy_action(s)).collect()
    }

    /// Clears all traces; call at every episode boundary not signalled by a
    /// terminal transition (e.g. time-limit truncation).
    pub fn end_episode(&mut self) {
        self.traces.clear();
    }

    /// One QV(λ) update for transition `t`.
    ///
    /// 1. `Q(s,a) += α [r + γV(s') − Q(s,a)]` with the current V.
    /// 2. Every trace decays by γλ, then `e(s) += 1`.
    /// 3. `V(x) += α δ e(x)` for every traced state `x`, with
    ///    `δ = r + γV(s') − V(s)`.
    ///
    /// `γV(s')` is taken as zero when `s'` is terminal, and a terminal
    /// transition clears the traces afterwards.
    pub fn qv_lambda_step(&mut self, t: &DiscreteTransition) -> Result<()> {
        self.check(t)?;
        let DiscreteTransition {
            state,
            action,
            reward,
            next_state,
            terminal,
        } = *t;
        let target = reward
            + if terminal {
                0.0
            } else {
                self.gamma * self.v[next_state]
            };

        let pair = state * self.num_actions + action;
        self.pair_visits[pair] += 1;
        self.state_visits[state] += 1;
        let alpha_q = self.learning_rate.at(self.pair_visits[pair]);
        self.q[pair] += alpha_q * (target - self.q[pair]);

        let decay = self.gamma * self.lambda;
        self.traces.retain(|_, e| {
            *e *= decay;
            *e >= TRACE_CUTOFF
        });
        *self.traces.entry(state).or_insert(0.0) += 1.0;

        let delta = target - self.v[state];
        for (&x, &e) in &self.traces {
            let alpha = self.learning_rate.at(self.state_visits[x]);
            self.v[x] += alpha * delta * e;
        }

        if terminal {
            self.end_episode();
        }
        Ok(())
    }

    fn check(&self, t: &DiscreteTransition) -> Result<()> {
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
        if !t.reward.is_finite() {
            return Err(Error::contract("reward must be finite"));
        }
        Ok(())
    }
}
