use serde::{Deserialize, Serialize};

use super::argmax;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub probability: f64,
    pub next_state: usize,
    pub reward: f64,
    /// Entering `next_state` ends the episode; nothing is bootstrapped from it.
    pub terminal: bool,
}

/// Explicit finite MDP: `outcomes[s][a]` lists the possible successors of
/// taking `a` in `s`. Terminal states have empty outcome lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabularModel {
    num_states: usize,
    num_actions: usize,
    outcomes: Vec<Vec<Vec<Outcome>>>,
}

impl TabularModel {
    pub fn new(
        num_states: usize,
        num_actions: usize,
        outcomes: Vec<Vec<Vec<Outcome>>>,
    ) -> Result<Self> {
        if num_states == 0 || num_actions == 0 {
            return Err(Error::contract("model needs at least one state and one action"));
        }
        if outcomes.len() != num_states || outcomes.iter().any(|row| row.len() != num_actions) {
            return Err(Error::contract("outcome table must be num_states x num_actions"));
        }
        for (s, row) in outcomes.iter().enumerate() {
            let terminal = row.iter().all(Vec::is_empty);
            for list in row {
                if list.is_empty() && !terminal {
                    return Err(Error::contract(format!(
                        "state {s} mixes terminal and non-terminal actions"
                    )));
                }
                let mut total = 0.0;
                for o in list {
                    if o.next_state >= num_states || !(o.probability >= 0.0) {
                        return Err(Error::contract(format!("invalid outcome {o:?} in state {s}")));
                    }
                    total += o.probability;
                }
                if !list.is_empty() && (total - 1.0).abs() > 1e-9 {
                    return Err(Error::contract(format!(
                        "outcome probabilities in state {s} sum to {total}"
                    )));
                }
            }
        }
        Ok(TabularModel {
            num_states,
            num_actions,
            outcomes,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn outcomes(&self, state: usize, action: usize) -> &[Outcome] {
        &self.outcomes[state][action]
    }

    pub fn is_terminal(&self, state: usize) -> bool {
        self.outcomes[state].iter().all(Vec::is_empty)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpOracleResult {
    pub v_star: Vec<f64>,
    /// Row-major `num_states x num_actions`.
    pub q_star: Vec<f64>,
    /// Greedy action per state, lowest index on ties; 0 for terminal states.
    pub policy: Vec<usize>,
    pub iterations: usize,
    pub residual: f64,
    num_actions: usize,
}

impl DpOracleResult {
    pub fn q(&self, state: usize, action: usize) -> f64 {
        self.q_star[state * self.num_actions + action]
    }

    pub fn q_row(&self, state: usize) -> &[f64] {
        &self.q_star[state * self.num_actions..(state + 1) * self.num_actions]
    }

    /// Whether `action` attains the maximum of `q_star` in `state` to within
    /// `tolerance`.
    pub fn is_optimal(&self, state: usize, action: usize, tolerance: f64) -> bool {
        let row = self.q_row(state);
        let best = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row[action] >= best - tolerance
    }
}

const MAX_SWEEPS: usize = 1_000_000;

fn backup(model: &TabularModel, v: &[f64], s: usize, a: usize, gamma: f64) -> f64 {
    model
        .outcomes(s, a)
        .iter()
        .map(|o| {
            let bootstrap = if o.terminal { 0.0 } else { gamma * v[o.next_state] };
            o.probability * (o.reward + bootstrap)
        })
        .sum()
}

/// Synchronous value iteration until the sup-norm change of a sweep is at
/// most `tolerance`.
pub fn value_iteration(model: &TabularModel, gamma: f64, tolerance: f64) -> Result<DpOracleResult> {
    value_iteration_capped(model, gamma, tolerance, MAX_SWEEPS)
}

pub fn value_iteration_capped(
    model: &TabularModel,
    gamma: f64,
    tolerance: f64,
    max_sweeps: usize,
) -> Result<DpOracleResult> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::contract(format!("discount {gamma} outside [0, 1]")));
    }
    if !(tolerance > 0.0) {
        return Err(Error::contract("tolerance must be positive"));
    }
    let n = model.num_states();
    let mut v = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while residual > tolerance {
        if iterations == max_sweeps {
            return Err(Error::NonConvergence {
                iterations,
                residual,
            });
        }
        residual = 0.0;
        for s in 0..n {
            next[s] = if model.is_terminal(s) {
                0.0
            } else {
                (0..model.num_actions())
                    .map(|a| backup(model, &v, s, a, gamma))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            residual = residual.max((next[s] - v[s]).abs());
        }
        std::mem::swap(&mut v, &mut next);
        iterations += 1;
    }

    let m = model.num_actions();
    let mut q_star = vec![0.0; n * m];
    let mut policy = vec![0; n];
    for s in 0..n {
        if model.is_terminal(s) {
            continue;
        }
        for a in 0..m {
            q_star[s * m + a] = backup(model, &v, s, a, gamma);
        }
        policy[s] = argmax(&q_star[s * m..(s + 1) * m]);
    }
    Ok(DpOracleResult {
        v_star: v,
        q_star,
        policy,
        iterations,
        residual,
        num_actions: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn self_loop(reward: f64) -> TabularModel {
        TabularModel::new(
            1,
            1,
            vec![vec![vec![Outcome {
                probability: 1.0,
                next_state: 0,
                reward,
                terminal: false,
            }]]],
        )
        .unwrap()
    }

    #[test]
    fn zero_rewards_give_zero_values() {
        let r = value_iteration(&self_loop(0.0), 0.9, 1e-12).unwrap();
        assert_eq!(r.v_star, vec![0.0]);
    }

    #[test]
    fn self_loop_is_a_geometric_series() {
        let r = value_iteration(&self_loop(1.0), 0.9, 1e-12).unwrap();
        assert!((r.v_star[0] - 10.0).abs() < 1e-10);
        assert!(r.residual <= 1e-12);
    }

    #[test]
    fn undiscounted_loop_does_not_converge() {
        match value_iteration_capped(&self_loop(1.0), 1.0, 1e-6, 1000) {
            Err(Error::NonConvergence { iterations, .. }) => assert_eq!(iterations, 1000),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ties_break_to_lowest_action() {
        let o = Outcome {
            probability: 1.0,
            next_state: 1,
            reward: 1.0,
            terminal: true,
        };
        let model =
            TabularModel::new(2, 3, vec![vec![vec![o]; 3], vec![Vec::new(); 3]]).unwrap();
        let r = value_iteration(&model, 0.5, 1e-12).unwrap();
        assert_eq!(r.policy[0], 0);
        assert!(r.is_optimal(0, 2, 0.0));
        assert_eq!(r.v_star, vec![1.0, 0.0]);
    }

    #[test]
    fn rejects_bad_tables() {
        let o = Outcome {
            probability: 0.5,
            next_state: 0,
            reward: 0.0,
            terminal: false,
        };
        assert!(TabularModel::new(1, 1, vec![vec![vec![o]]]).is_err());
        assert!(TabularModel::new(1, 2, vec![vec![vec![o, o]]]).is_err());
    }
}
