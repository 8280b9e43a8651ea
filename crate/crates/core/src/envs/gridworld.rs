use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use rand::Rng;

use super::{EnvSpec, Environment, EpisodeClock, StepResult};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, StreamRng};
use crate::tabular::{Outcome, TabularModel};

/// The shipped 9×6 maze in map-file form.
pub const DYNA_MAZE: &str = include_str!("../../maps/dyna_maze.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

/// Up, right, down, left as `(row, col)` offsets; the action index is the
/// position in this table.
const MOVES: [(isize, isize); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];
pub const ACTION_NAMES: [&str; 4] = ["up", "right", "down", "left"];

/// Grid maze with optional slippery moves.
///
/// Observations are one-hot over all `width * height` cells (row-major);
/// [`GridWorld::cell_index`] gives the same index directly for tabular
/// methods.
#[derive(Debug, Clone)]
pub struct GridWorld {
    width: usize,
    height: usize,
    walls: BTreeSet<Cell>,
    start: Cell,
    goal: Cell,
    step_reward: f64,
    goal_reward: f64,
    slip_probability: f64,
    spec: EnvSpec,
    position: Cell,
    rng: StreamRng,
    clock: EpisodeClock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridWorldConfig {
    pub width: usize,
    pub height: usize,
    pub walls: BTreeSet<Cell>,
    pub start: Cell,
    pub goal: Cell,
    pub step_reward: f64,
    pub goal_reward: f64,
    pub slip_probability: f64,
    pub max_episode_steps: usize,
}

impl GridWorld {
    pub fn new(config: GridWorldConfig) -> Result<Self> {
        let GridWorldConfig {
            width,
            height,
            walls,
            start,
            goal,
            step_reward,
            goal_reward,
            slip_probability,
            max_episode_steps,
        } = config;
        let bad = |msg: String| Err(Error::Config(msg));
        if width == 0 || height == 0 {
            return bad(format!("grid must be non-empty, got {width}x{height}"));
        }
        let inside = |c: &Cell| c.row < height && c.col < width;
        if !inside(&start) || !inside(&goal) || !walls.iter().all(inside) {
            return bad("start, goal and walls must lie inside the grid".into());
        }
        if start == goal {
            return bad("start and goal must differ".into());
        }
        if walls.contains(&start) || walls.contains(&goal) {
            return bad("start and goal cannot be walls".into());
        }
        if !(0.0..=1.0).contains(&slip_probability) {
            return bad(format!("slip probability {slip_probability} outside [0, 1]"));
        }
        if max_episode_steps == 0 {
            return bad("max_episode_steps must be at least 1".into());
        }
        let world = GridWorld {
            width,
            height,
            walls,
            start,
            goal,
            step_reward,
            goal_reward,
            slip_probability,
            spec: EnvSpec {
                observation_dim: width * height,
                action_count: 4,
                max_episode_steps,
                solve_threshold: None,
            },
            position: start,
            rng: stream_rng(0),
            clock: EpisodeClock::default(),
        };
        let distances = world.distances_to_goal();
        if let Some(cell) = world.open_cells().find(|c| distances[world.index_of(*c)].is_none()) {
            return bad(format!(
                "cell ({}, {}) cannot reach the goal",
                cell.row, cell.col
            ));
        }
        Ok(world)
    }

    pub fn dyna_maze() -> Self {
        Self::parse(DYNA_MAZE).expect("shipped maze is valid")
    }

    /// Parses the map-file format documented in `maps/README.md`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_config(text).and_then(Self::new)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_config(&text)
            .map_err(|e| Error::parse(path, e))
            .and_then(Self::new)
    }

    pub fn parse_config(text: &str) -> Result<GridWorldConfig> {
        let mut step_reward = 0.0;
        let mut goal_reward = 1.0;
        let mut slip_probability = 0.0;
        let mut max_episode_steps = 2000;
        let mut rows: Vec<&str> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with(';') || line.starts_with("//") {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                if !rows.is_empty() {
                    return Err(Error::Config(format!(
                        "line {}: header entries must precede the grid",
                        lineno + 1
                    )));
                }
                let value = value.trim();
                let num = |v: &str| {
                    v.parse::<f64>().map_err(|e| {
                        Error::Config(format!("line {}: {key}: {e}", lineno + 1))
                    })
                };
                match key.trim() {
                    "step_reward" => step_reward = num(value)?,
                    "goal_reward" => goal_reward = num(value)?,
                    "slip" => slip_probability = num(value)?,
                    "max_steps" => {
                        max_episode_steps = value.parse().map_err(|e| {
                            Error::Config(format!("line {}: max_steps: {e}", lineno + 1))
                        })?
                    }
                    other => {
                        return Err(Error::Config(format!(
                            "line {}: unknown header key {other:?}",
                            lineno + 1
                        )))
                    }
                }
            } else {
                rows.push(line);
            }
        }

        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut walls = BTreeSet::new();
        let (mut start, mut goal) = (None, None);
        for (row, line) in rows.iter().enumerate() {
            if line.chars().count() != width {
                return Err(Error::Config(format!(
                    "grid row {row} has {} cells, expected {width}",
                    line.chars().count()
                )));
            }
            for (col, ch) in line.chars().enumerate() {
                let cell = Cell::new(row, col);
                match ch {
                    '.' => {}
                    '#' => {
                        walls.insert(cell);
                    }
                    'S' if start.is_none() => start = Some(cell),
                    'G' if goal.is_none() => goal = Some(cell),
                    'S' | 'G' => {
                        return Err(Error::Config(format!("duplicate {ch:?} marker")))
                    }
                    other => {
                        return Err(Error::Config(format!(
                            "unexpected map character {other:?} at row {row}, column {col}"
                        )))
                    }
                }
            }
        }
        Ok(GridWorldConfig {
            width,
            height,
            walls,
            start: start.ok_or_else(|| Error::Config("map has no start cell 'S'".into()))?,
            goal: goal.ok_or_else(|| Error::Config("map has no goal cell 'G'".into()))?,
            step_reward,
            goal_reward,
            slip_probability,
            max_episode_steps,
        })
    }

    pub fn with_slip(mut self, slip_probability: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&slip_probability) {
            return Err(Error::Config(format!(
                "slip probability {slip_probability} outside [0, 1]"
            )));
        }
        self.slip_probability = slip_probability;
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn start(&self) -> Cell {
        self.start
    }

    pub fn goal(&self) -> Cell {
        self.goal
    }

    pub fn position(&self) -> Cell {
        self.position
    }

    pub fn step_reward(&self) -> f64 {
        self.step_reward
    }

    pub fn goal_reward(&self) -> f64 {
        self.goal_reward
    }

    pub fn slip_probability(&self) -> f64 {
        self.slip_probability
    }

    pub fn is_wall(&self, cell: Cell) -> bool {
        self.walls.contains(&cell)
    }

    pub fn num_cells(&self) -> usize {
        self.width * self.height
    }

    pub fn index_of(&self, cell: Cell) -> usize {
        cell.row * self.width + cell.col
    }

    pub fn cell_of(&self, index: usize) -> Cell {
        Cell::new(index / self.width, index % self.width)
    }

    pub fn cell_index(&self) -> usize {
        self.index_of(self.position)
    }

    pub fn open_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.num_cells())
            .map(|i| self.cell_of(i))
            .filter(|c| !self.walls.contains(c))
    }

    /// Places the agent on `cell` and starts a fresh episode there.
    pub fn set_position(&mut self, cell: Cell) -> Result<()> {
        if cell.row >= self.height || cell.col >= self.width || self.is_wall(cell) {
            return Err(Error::contract(format!("cannot place agent on {cell:?}")));
        }
        self.position = cell;
        self.clock.reset();
        Ok(())
    }

    /// Cell reached by moving in `direction` from `from`; walls and borders
    /// leave the agent in place.
    pub fn neighbor(&self, from: Cell, direction: usize) -> Cell {
        let (dr, dc) = MOVES[direction];
        let row = from.row as isize + dr;
        let col = from.col as isize + dc;
        if row < 0 || col < 0 || row >= self.height as isize || col >= self.width as isize {
            return from;
        }
        let next = Cell::new(row as usize, col as usize);
        if self.walls.contains(&next) {
            from
        } else {
            next
        }
    }

    /// Breadth-first step counts to the goal for every cell index.
    pub fn distances_to_goal(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_cells()];
        let mut queue = VecDeque::from([self.goal]);
        dist[self.index_of(self.goal)] = Some(0);
        while let Some(cell) = queue.pop_front() {
            let d = dist[self.index_of(cell)].unwrap();
            for dir in 0..4 {
                // moves are reversible, so neighbors of `cell` can reach it in one step
                let prev = self.neighbor(cell, dir);
                if prev != cell && dist[self.index_of(prev)].is_none() {
                    dist[self.index_of(prev)] = Some(d + 1);
                    queue.push_back(prev);
                }
            }
        }
        dist
    }

    pub fn one_hot(&self, cell: Cell) -> Vec<f64> {
        let mut obs = vec![0.0; self.num_cells()];
        obs[self.index_of(cell)] = 1.0;
        obs
    }

    /// Explicit transition and reward tables over all cells. The goal is
    /// terminal; wall cells are unreachable self-loops with zero reward.
    pub fn model(&self) -> TabularModel {
        let n = self.num_cells();
        let mut outcomes = Vec::with_capacity(n);
        let mut terminal = vec![false; n];
        terminal[self.index_of(self.goal)] = true;
        for s in 0..n {
            let cell = self.cell_of(s);
            let mut per_action = Vec::with_capacity(4);
            for a in 0..4 {
                if terminal[s] {
                    per_action.push(Vec::new());
                    continue;
                }
                if self.is_wall(cell) {
                    per_action.push(vec![Outcome {
                        probability: 1.0,
                        next_state: s,
                        reward: 0.0,
                        terminal: false,
                    }]);
                    continue;
                }
                let mut list: Vec<Outcome> = Vec::new();
                for executed in 0..4 {
                    let p = if executed == a {
                        1.0 - self.slip_probability
                    } else {
                        self.slip_probability / 3.0
                    };
                    if p == 0.0 {
                        continue;
                    }
                    let next = self.neighbor(cell, executed);
                    let at_goal = next == self.goal;
                    let reward = if at_goal {
                        self.goal_reward
                    } else {
                        self.step_reward
                    };
                    let next_state = self.index_of(next);
                    match list.iter_mut().find(|o| o.next_state == next_state) {
                        Some(o) => o.probability += p,
                        None => list.push(Outcome {
                            probability: p,
                            next_state,
                            reward,
                            terminal: at_goal,
                        }),
                    }
                }
                per_action.push(list);
            }
            outcomes.push(per_action);
        }
        TabularModel::new(n, 4, outcomes).expect("gridworld model is well-formed")
    }
}

impl Environment for GridWorld {
    fn name(&self) -> &'static str {
        "gridworld"
    }

    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        self.rng = stream_rng(seed);
        self.position = self.start;
        self.clock.reset();
        self.observation()
    }

    fn step(&mut self, action: usize) -> Result<StepResult> {
        self.clock.begin_step(&self.spec, action)?;
        let mut executed = action;
        if self.slip_probability > 0.0 && self.rng.gen_bool(self.slip_probability) {
            let k = self.rng.gen_range(0..3);
            executed = (0..4).filter(|&d| d != action).nth(k).unwrap();
        }
        self.position = self.neighbor(self.position, executed);
        let at_goal = self.position == self.goal;
        let (terminal, truncated) = self.clock.finish_step(&self.spec, at_goal);
        Ok(StepResult {
            observation: self.observation(),
            reward: if at_goal {
                self.goal_reward
            } else {
                self.step_reward
            },
            terminal,
            truncated,
        })
    }

    fn observation(&self) -> Vec<f64> {
        self.one_hot(self.position)
    }
}
