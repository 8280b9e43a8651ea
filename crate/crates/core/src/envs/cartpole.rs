use rand::Rng;

use super::{EnvSpec, Environment, EpisodeClock, StepResult};
use crate::error::Result;
use crate::rng::stream_rng;

pub const GRAVITY: f64 = 9.8;
pub const CART_MASS: f64 = 1.0;
pub const POLE_MASS: f64 = 0.1;
/// Half the pole length.
pub const POLE_HALF_LENGTH: f64 = 0.5;
pub const FORCE_MAGNITUDE: f64 = 10.0;
pub const TIMESTEP: f64 = 0.02;
pub const ANGLE_LIMIT: f64 = 12.0 * 2.0 * std::f64::consts::PI / 360.0;
pub const POSITION_LIMIT: f64 = 2.4;
pub const INIT_RANGE: f64 = 0.05;

/// Cart-pole balancing with explicit Euler integration.
///
/// State is `[x, x_dot, theta, theta_dot]`. Action 0 pushes left, 1 pushes
/// right. Every step, including the failing one, pays +1.
#[derive(Debug, Clone)]
pub struct CartPole {
    spec: EnvSpec,
    state: [f64; 4],
    clock: EpisodeClock,
}

impl Default for CartPole {
    fn default() -> Self {
        Self::new()
    }
}

impl CartPole {
    pub fn new() -> Self {
        Self::with_max_steps(500)
    }

    pub fn with_max_steps(max_episode_steps: usize) -> Self {
        CartPole {
            spec: EnvSpec {
                observation_dim: 4,
                action_count: 2,
                max_episode_steps: max_episode_steps.max(1),
                solve_threshold: Some(195.0),
            },
            state: [0.0; 4],
            clock: EpisodeClock::default(),
        }
    }

    pub fn state(&self) -> [f64; 4] {
        self.state
    }

    /// Starts an episode from an explicit state.
    pub fn set_state(&mut self, state: [f64; 4]) {
        self.state = state;
        self.clock.reset();
    }

    fn integrate(&mut self, action: usize) {
        let [x, x_dot, theta, theta_dot] = self.state;
        let force = if action == 1 {
            FORCE_MAGNITUDE
        } else {
            -FORCE_MAGNITUDE
        };
        let total_mass = CART_MASS + POLE_MASS;
        let pole_moment = POLE_MASS * POLE_HALF_LENGTH;
        let (sin, cos) = theta.sin_cos();

        let temp = (force + pole_moment * theta_dot * theta_dot * sin) / total_mass;
        let theta_acc = (GRAVITY * sin - cos * temp)
            / (POLE_HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos * cos / total_mass));
        let x_acc = temp - pole_moment * theta_acc * cos / total_mass;

        self.state = [
            x + TIMESTEP * x_dot,
            x_dot + TIMESTEP * x_acc,
            theta + TIMESTEP * theta_dot,
            theta_dot + TIMESTEP * theta_acc,
        ];
    }
}

impl Environment for CartPole {
    fn name(&self) -> &'static str {
        "cartpole"
    }

    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        let mut rng = stream_rng(seed);
        for v in self.state.iter_mut() {
            *v = rng.gen_range(-INIT_RANGE..INIT_RANGE);
        }
        self.clock.reset();
        self.observation()
    }

    fn step(&mut self, action: usize) -> Result<StepResult> {
        self.clock.begin_step(&self.spec, action)?;
        self.integrate(action);
        let [x, _, theta, _] = self.state;
        let failed = x.abs() > POSITION_LIMIT || theta.abs() > ANGLE_LIMIT;
        let (terminal, truncated) = self.clock.finish_step(&self.spec, failed);
        Ok(StepResult {
            observation: self.observation(),
            reward: 1.0,
            terminal,
            truncated,
        })
    }

    fn observation(&self) -> Vec<f64> {
        self.state.to_vec()
    }
}
