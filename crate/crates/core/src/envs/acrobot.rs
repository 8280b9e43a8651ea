use std::f64::consts::PI;

use rand::Rng;

use super::{EnvSpec, Environment, EpisodeClock, StepResult};
use crate::error::Result;
use crate::rng::stream_rng;

pub const TIMESTEP: f64 = 0.2;
pub const LINK_LENGTH_1: f64 = 1.0;
pub const LINK_MASS_1: f64 = 1.0;
pub const LINK_MASS_2: f64 = 1.0;
pub const LINK_COM_1: f64 = 0.5;
pub const LINK_COM_2: f64 = 0.5;
pub const LINK_MOI: f64 = 1.0;
pub const GRAVITY: f64 = 9.8;
pub const MAX_VELOCITY_1: f64 = 4.0 * PI;
pub const MAX_VELOCITY_2: f64 = 9.0 * PI;
pub const TORQUES: [f64; 3] = [-1.0, 0.0, 1.0];
pub const INIT_RANGE: f64 = 0.1;
/// The episode ends once `-cos(θ1) - cos(θ1 + θ2)` exceeds this.
pub const TIP_HEIGHT: f64 = 1.0;

/// Two-link underactuated pendulum, torque on the middle joint.
///
/// State is `[θ1, θ2, θ̇1, θ̇2]`, integrated with one fourth-order
/// Runge-Kutta step per action. Observations are
/// `[cos θ1, sin θ1, cos θ2, sin θ2, θ̇1, θ̇2]`. Reward is −1 per step and 0
/// on the step that reaches the goal height.
#[derive(Debug, Clone)]
pub struct Acrobot {
    spec: EnvSpec,
    state: [f64; 4],
    clock: EpisodeClock,
}

impl Default for Acrobot {
    fn default() -> Self {
        Self::new()
    }
}

fn wrap(mut x: f64, low: f64, high: f64) -> f64 {
    let span = high - low;
    while x > high {
        x -= span;
    }
    while x < low {
        x += span;
    }
    x
}

/// Time derivative of `[θ1, θ2, θ̇1, θ̇2]` under `torque`.
pub fn derivatives(s: [f64; 4], torque: f64) -> [f64; 4] {
    let (m1, m2) = (LINK_MASS_1, LINK_MASS_2);
    let (l1, lc1, lc2) = (LINK_LENGTH_1, LINK_COM_1, LINK_COM_2);
    let (i1, i2) = (LINK_MOI, LINK_MOI);
    let g = GRAVITY;
    let [theta1, theta2, dtheta1, dtheta2] = s;

    let d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * theta2.cos()) + i1 + i2;
    let d2 = m2 * (lc2 * lc2 + l1 * lc2 * theta2.cos()) + i2;
    let phi2 = m2 * lc2 * g * (theta1 + theta2 - PI / 2.0).cos();
    let phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * theta2.sin()
        - 2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * theta2.sin()
        + (m1 * lc1 + m2 * l1) * g * (theta1 - PI / 2.0).cos()
        + phi2;
    let ddtheta2 = (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * theta2.sin()
        - phi2)
        / (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
    let ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
    [dtheta1, dtheta2, ddtheta1, ddtheta2]
}

fn axpy(a: f64, x: [f64; 4], y: [f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| y[i] + a * x[i])
}

/// One classical RK4 step of size `dt`.
pub fn rk4_step(s: [f64; 4], torque: f64, dt: f64) -> [f64; 4] {
    let k1 = derivatives(s, torque);
    let k2 = derivatives(axpy(dt / 2.0, k1, s), torque);
    let k3 = derivatives(axpy(dt / 2.0, k2, s), torque);
    let k4 = derivatives(axpy(dt, k3, s), torque);
    std::array::from_fn(|i| s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

impl Acrobot {
    pub fn new() -> Self {
        Self::with_max_steps(500)
    }

    pub fn with_max_steps(max_episode_steps: usize) -> Self {
        Acrobot {
            spec: EnvSpec {
                observation_dim: 6,
                action_count: 3,
                max_episode_steps: max_episode_steps.max(1),
                solve_threshold: Some(-120.0),
            },
            state: [0.0; 4],
            clock: EpisodeClock::default(),
        }
    }

    pub fn state(&self) -> [f64; 4] {
        self.state
    }

    pub fn set_state(&mut self, state: [f64; 4]) {
        self.state = state;
        self.clock.reset();
    }

    /// Kinetic plus potential energy of the current state.
    pub fn mechanical_energy(&self) -> f64 {
        let (m1, m2) = (LINK_MASS_1, LINK_MASS_2);
        let (l1, lc1, lc2) = (LINK_LENGTH_1, LINK_COM_1, LINK_COM_2);
        let [theta1, theta2, dtheta1, dtheta2] = self.state;
        let d1 = m1 * lc1 * lc1
            + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * theta2.cos())
            + 2.0 * LINK_MOI;
        let d2 = m2 * (lc2 * lc2 + l1 * lc2 * theta2.cos()) + LINK_MOI;
        let d3 = m2 * lc2 * lc2 + LINK_MOI;
        let kinetic =
            0.5 * (d1 * dtheta1 * dtheta1 + 2.0 * d2 * dtheta1 * dtheta2 + d3 * dtheta2 * dtheta2);
        let potential = -(m1 * lc1 + m2 * l1) * GRAVITY * theta1.cos()
            - m2 * lc2 * GRAVITY * (theta1 + theta2).cos();
        kinetic + potential
    }

    fn tip_height(&self) -> f64 {
        let [theta1, theta2, _, _] = self.state;
        -theta1.cos() - (theta1 + theta2).cos()
    }
}

impl Environment for Acrobot {
    fn name(&self) -> &'static str {
        "acrobot"
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
        let next = rk4_step(self.state, TORQUES[action], TIMESTEP);
        self.state = [
            wrap(next[0], -PI, PI),
            wrap(next[1], -PI, PI),
            next[2].clamp(-MAX_VELOCITY_1, MAX_VELOCITY_1),
            next[3].clamp(-MAX_VELOCITY_2, MAX_VELOCITY_2),
        ];
        let reached = self.tip_height() > TIP_HEIGHT;
        let (terminal, truncated) = self.clock.finish_step(&self.spec, reached);
        Ok(StepResult {
            observation: self.observation(),
            reward: if terminal { 0.0 } else { -1.0 },
            terminal,
            truncated,
        })
    }

    fn observation(&self) -> Vec<f64> {
        let [theta1, theta2, dtheta1, dtheta2] = self.state;
        vec![
            theta1.cos(),
            theta1.sin(),
            theta2.cos(),
            theta2.sin(),
            dtheta1,
            dtheta2,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reset_within_initial_range() {
        let mut env = Acrobot::new();
        for seed in 0..20 {
            env.reset(seed);
            assert!(env.state().iter().all(|v| v.abs() <= INIT_RANGE));
        }
        assert_eq!(env.spec().action_count, 3);
        assert_eq!(env.spec().observation_dim, 6);
    }

    #[test]
    fn wrap_keeps_angles_in_range() {
        assert!((wrap(3.0 * PI / 2.0, -PI, PI) + PI / 2.0).abs() < 1e-12);
        assert!((wrap(-5.0 * PI / 2.0, -PI, PI) + PI / 2.0).abs() < 1e-12);
        assert_eq!(wrap(0.3, -PI, PI), 0.3);
    }

    #[test]
    fn rest_is_an_equilibrium() {
        let s = rk4_step([0.0; 4], 0.0, TIMESTEP);
        assert!(s.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn passive_episode_is_truncated_with_minus_one_rewards() {
        let mut env = Acrobot::new();
        env.reset(3);
        let mut total = 0.0;
        let mut last = None;
        for _ in 0..500 {
            let r = env.step(1).unwrap();
            total += r.reward;
            last = Some(r);
        }
        let last = last.unwrap();
        assert!(last.truncated && !last.terminal);
        assert_eq!(total, -500.0);
    }
}
