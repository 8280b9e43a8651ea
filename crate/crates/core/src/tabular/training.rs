use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{DiscreteTransition, DpOracleResult, LearningRate, QTable, TabularValueStore};
use crate::envs::{Cell, Environment, GridWorld};
use crate::error::Result;
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TabularAlgorithm {
    QvLambda,
    QLearning,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TabularRunConfig {
    pub algorithm: TabularAlgorithm,
    /// Total environment steps across episodes.
    pub steps: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub learning_rate: LearningRate,
    /// Starting value of every V and Q entry. Greedy ties go to the lowest
    /// action index, so with a sparse goal reward and all-zero tables the
    /// behavior policy keeps pressing the same action; starting at the
    /// largest achievable return instead makes every untried action look
    /// better than a tried one.
    pub initial_value: f64,
    pub seed: u64,
}

impl TabularRunConfig {
    pub fn new(algorithm: TabularAlgorithm, seed: u64) -> Self {
        TabularRunConfig {
            algorithm,
            steps: 50_000,
            epsilon: 0.1,
            gamma: 0.99,
            lambda: 0.7,
            learning_rate: LearningRate::Polynomial { exponent: 0.7 },
            initial_value: 1.0,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TabularRunReport {
    pub episodes: usize,
    pub steps: usize,
    /// Greedy action per cell index.
    pub greedy_policy: Vec<usize>,
    /// Learned Q values, row-major `cells x actions`.
    pub q_values: Vec<f64>,
    pub store: Option<TabularValueStore>,
}

enum Learner {
    Qv(TabularValueStore),
    Q {
        table: QTable,
        visits: Vec<u64>,
        rate: LearningRate,
        gamma: f64,
    },
}

impl Learner {
    fn row(&self, s: usize) -> &[f64] {
        match self {
            Learner::Qv(store) => store.q_row(s),
            Learner::Q { table, .. } => table.row(s),
        }
    }

    fn greedy(&self, s: usize) -> usize {
        super::argmax(self.row(s))
    }

    fn update(&mut self, t: &DiscreteTransition) -> Result<()> {
        match self {
            Learner::Qv(store) => store.qv_lambda_step(t),
            Learner::Q {
                table,
                visits,
                rate,
                gamma,
            } => {
                let i = t.state * table.num_actions() + t.action;
                visits[i] += 1;
                let alpha = rate.at(visits[i]);
                table.q_learning_step(t, alpha, *gamma)
            }
        }
    }

    fn end_episode(&mut self) {
        if let Learner::Qv(store) = self {
            store.end_episode();
        }
    }
}

/// Trains a tabular learner on `maze` with ε-greedy behavior (greedy ties
/// go to the lowest action index).
pub fn train_gridworld(maze: &GridWorld, config: &TabularRunConfig) -> Result<TabularRunReport> {
    let mut env = maze.clone();
    let n = env.num_cells();
    let m = env.spec().action_count;
    let mut learner = match config.algorithm {
        TabularAlgorithm::QvLambda => {
            let mut store =
                TabularValueStore::new(n, m, config.learning_rate, config.gamma, config.lambda)?;
            store.fill(config.initial_value);
            Learner::Qv(store)
        }
        TabularAlgorithm::QLearning => Learner::Q {
            table: {
                let mut table = QTable::new(n, m);
                table.fill(config.initial_value);
                table
            },
            visits: vec![0; n * m],
            rate: config.learning_rate,
            gamma: config.gamma,
        },
    };

    let mut rng = stream_rng(config.seed);
    let mut steps = 0;
    let mut episodes = 0;
    while steps < config.steps {
        env.reset(rng.gen());
        episodes += 1;
        loop {
            let s = env.cell_index();
            let a = if rng.gen_bool(config.epsilon) {
                rng.gen_range(0..m)
            } else {
                learner.greedy(s)
            };
            let result = env.step(a)?;
            steps += 1;
            learner.update(&DiscreteTransition {
                state: s,
                action: a,
                reward: result.reward,
                next_state: env.cell_index(),
                terminal: result.terminal,
            })?;
            if result.done() || steps >= config.steps {
                learner.end_episode();
                break;
            }
        }
    }

    let greedy_policy = (0..n).map(|s| learner.greedy(s)).collect();
    let q_values = (0..n).flat_map(|s| learner.row(s).to_vec()).collect();
    let store = match learner {
        Learner::Qv(store) => Some(store),
        Learner::Q { .. } => None,
    };
    Ok(TabularRunReport {
        episodes,
        steps,
        greedy_policy,
        q_values,
        store,
    })
}

/// Cells visited when following `policy` from the start (goal excluded).
/// Stops early if the policy revisits a cell.
pub fn greedy_path(maze: &GridWorld, policy: &[usize]) -> Vec<usize> {
    let mut path = Vec::new();
    let mut cell = maze.start();
    while cell != maze.goal() {
        let s = maze.index_of(cell);
        if path.contains(&s) {
            break;
        }
        path.push(s);
        cell = maze.neighbor(cell, policy[s]);
    }
    path
}

/// The maze with one arrow (`^ > v <`) per open cell, `#` for walls and
/// `G` for the goal.
pub fn render_policy(maze: &GridWorld, policy: &[usize]) -> String {
    const ARROWS: [char; 4] = ['^', '>', 'v', '<'];
    let mut out = String::new();
    for row in 0..maze.height() {
        for col in 0..maze.width() {
            let cell = Cell::new(row, col);
            out.push(if maze.is_wall(cell) {
                '#'
            } else if cell == maze.goal() {
                'G'
            } else {
                ARROWS[policy[maze.index_of(cell)]]
            });
        }
        out.push('\n');
    }
    out
}

/// `values` laid out on the maze grid, walls left blank.
pub fn render_values(maze: &GridWorld, values: &[f64]) -> String {
    let mut out = String::new();
    for row in 0..maze.height() {
        let line: Vec<String> = (0..maze.width())
            .map(|col| {
                let cell = Cell::new(row, col);
                if maze.is_wall(cell) {
                    format!("{:>7}", "")
                } else {
                    format!("{:>7.4}", values[maze.index_of(cell)])
                }
            })
            .collect();
        out.push_str(line.join(" ").trim_end());
        out.push('\n');
    }
    out
}

/// Fraction of `states` where `policy` picks an action that is optimal
/// under the oracle's `q_star`.
pub fn policy_agreement(policy: &[usize], oracle: &DpOracleResult, states: &[usize]) -> f64 {
    if states.is_empty() {
        return 1.0;
    }
    let hits = states
        .iter()
        .filter(|&&s| oracle.is_optimal(s, policy[s], 1e-9))
        .count();
    hits as f64 / states.len() as f64
}
