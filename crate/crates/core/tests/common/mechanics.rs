//! Properties of the training loop, shared by the `agents` tests and the
//! acceptance runner. Each check returns a `TestCaseError` instead of
//! panicking so proptest can shrink failures.

use dqv::agents::{Agent, AgentConfig, Algorithm, DeepQAgent, DqvAgent, Preset, ReplayConfig, Trainer};
use dqv::envs::{CartPole, Environment, GridWorld};
use dqv::nn::OptimizerConfig;
use dqv::replay::{ReplayBuffer, Transition};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), TestCaseError>;

pub fn transition(state: Vec<f64>, action: usize, reward: f64, next_state: Vec<f64>, terminal: bool) -> Transition {
    Transition {
        state,
        action,
        reward,
        next_state,
        terminal,
    }
}

pub fn tagged(tag: usize) -> Transition {
    transition(vec![tag as f64], 0, 0.0, vec![0.0], false)
}

pub fn small_dqv(seed: u64, period: Option<u64>) -> DqvAgent {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DqvAgent::new(3, 2, &[8], OptimizerConfig::adam(1e-2), 0.95, period, &mut rng).unwrap()
}

pub fn small_deep_q(seed: u64, double: bool, period: Option<u64>) -> DeepQAgent {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DeepQAgent::new(double, 3, 2, &[8], OptimizerConfig::adam(1e-2), 0.95, period, &mut rng).unwrap()
}

pub fn tiny_config(algorithm: Algorithm, replay: Option<ReplayConfig>) -> AgentConfig {
    AgentConfig {
        hidden_layers: vec![8],
        replay,
        ..AgentConfig::preset(Preset::CartPole, algorithm)
    }
}

pub fn batch_strategy() -> impl Strategy<Value = Vec<Transition>> {
    prop::collection::vec(
        (
            prop::collection::vec(-1.0f64..1.0, 3),
            0usize..2,
            -2.0f64..2.0,
            prop::collection::vec(-1.0f64..1.0, 3),
            any::<bool>(),
        ),
        1..12,
    )
    .prop_map(|v| v.into_iter().map(|(s, a, r, n, t)| transition(s, a, r, n, t)).collect())
}

/// The buffer keeps exactly the newest `capacity` transitions, oldest first.
pub fn fifo(capacity: usize, pushes: usize) -> Check {
    let mut buffer = ReplayBuffer::new(capacity, 1, 0).unwrap();
    for i in 0..pushes {
        buffer.push(tagged(i));
    }
    let kept: Vec<usize> = buffer.iter().map(|t| t.state[0] as usize).collect();
    let first = pushes.saturating_sub(capacity);
    prop_assert_eq!(kept, (first..pushes).collect::<Vec<_>>());
    prop_assert_eq!(buffer.len(), pushes.min(capacity));
    Ok(())
}

/// No training step happens before `warmup` experiences; afterwards exactly
/// one per action.
pub fn warmup(warmup: usize, episodes: usize, seed: u64) -> Check {
    let config = tiny_config(
        Algorithm::Dqv,
        Some(ReplayConfig {
            capacity: 200,
            warmup,
            batch: 16,
        }),
    );
    let mut env = CartPole::new();
    let mut trainer = Trainer::new(config, env.spec(), 0, seed).unwrap();
    for _ in 0..episodes {
        trainer.run_episode(&mut env).unwrap();
    }
    let expected = (trainer.experiences() + 1).saturating_sub(warmup as u64);
    prop_assert_eq!(trainer.agent().train_steps(), expected);
    Ok(())
}

/// Every algorithm targets exactly `r` on terminal transitions.
pub fn terminal_target(batch: &[Transition], seed: u64) -> Check {
    let refs: Vec<&Transition> = batch.iter().collect();
    let all = [
        small_dqv(seed, Some(5)).compute_targets(&refs).unwrap(),
        small_deep_q(seed, false, Some(5)).compute_targets(&refs).unwrap(),
        small_deep_q(seed, true, Some(5)).compute_targets(&refs).unwrap(),
    ];
    for targets in all {
        for (t, y) in batch.iter().zip(&targets) {
            if t.terminal {
                prop_assert_eq!(*y, t.reward);
            }
        }
    }
    Ok(())
}

/// DQV computes `r + γ V(s')` once and regresses both networks onto it.
pub fn shared_target(batch: &[Transition], seed: u64) -> Check {
    let refs: Vec<&Transition> = batch.iter().collect();
    let mut agent = small_dqv(seed, None);
    let targets = agent.compute_targets(&refs).unwrap();
    for (t, y) in batch.iter().zip(&targets) {
        if !t.terminal {
            let v_next = agent.v_net().forward(&t.next_state).unwrap()[0];
            prop_assert!((y - (t.reward + 0.95 * v_next)).abs() < 1e-12);
        }
    }
    let mut manual = agent.clone();
    agent.train_on_batch(&refs).unwrap();
    manual.train_on_targets(&refs, &targets).unwrap();
    prop_assert_eq!(agent.q_net(), manual.q_net());
    prop_assert_eq!(agent.v_net(), manual.v_net());
    Ok(())
}

/// Target networks stay frozen between syncs and equal the online network
/// right after each one.
pub fn target_sync(period: u64, steps: u64, seed: u64, batch: &[Transition]) -> Check {
    let refs: Vec<&Transition> = batch.iter().collect();
    let mut dqv = small_dqv(seed, Some(period));
    let mut dqn = small_deep_q(seed, false, Some(period));
    let mut frozen_v = dqv.v_target().clone();
    let mut frozen_q = dqn.q_target().clone();
    for step in 1..=steps {
        dqv.train_on_batch(&refs).unwrap();
        dqn.train_on_batch(&refs).unwrap();
        if step % period == 0 {
            prop_assert_eq!(dqv.v_target(), dqv.v_net());
            prop_assert_eq!(dqn.q_target(), dqn.q_net());
            frozen_v = dqv.v_target().clone();
            frozen_q = dqn.q_target().clone();
        } else {
            prop_assert_eq!(dqv.v_target(), &frozen_v);
            prop_assert_eq!(dqn.q_target(), &frozen_q);
        }
        prop_assert_eq!(Agent::steps_since_sync(&dqv), step % period);
    }
    Ok(())
}

/// Stored rewards are clipped to [-1, 1]; reported returns are not.
pub fn reward_clipping(step_reward: i32, goal_reward: i32, seed: u64) -> Check {
    let maze = format!("step_reward = {step_reward}\ngoal_reward = {goal_reward}\nmax_steps = 40\nS..\n...\n..G\n");
    let mut env = GridWorld::parse(&maze).unwrap();
    let config = tiny_config(
        Algorithm::Dqn,
        Some(ReplayConfig {
            capacity: 10_000,
            warmup: 16,
            batch: 16,
        }),
    );
    let mut trainer = Trainer::new(config, env.spec(), 0, seed).unwrap();
    let mut raw = 0.0;
    for _ in 0..5 {
        raw += trainer.run_episode(&mut env).unwrap().raw_return;
    }
    let clip = |r: i32| (r as f64).clamp(-1.0, 1.0);
    let (mut steps, mut goals) = (0.0, 0.0);
    for t in trainer.replay().unwrap().iter() {
        steps += 1.0;
        if t.terminal {
            goals += 1.0;
            prop_assert_eq!(t.reward, clip(goal_reward));
        } else {
            prop_assert_eq!(t.reward, clip(step_reward));
        }
    }
    prop_assert_eq!(raw, step_reward as f64 * (steps - goals) + goal_reward as f64 * goals);
    Ok(())
}

/// ε starts at `epsilon_start`, reaches `epsilon_end` at the decay horizon,
/// stays there, and never increases.
pub fn epsilon_endpoints(start: f64, frac: f64, decay: u64, step: u64) -> Check {
    let config = AgentConfig {
        epsilon_start: start,
        epsilon_end: start * frac,
        epsilon_decay_steps: decay,
        ..AgentConfig::preset(Preset::CartPole, Algorithm::Dqv)
    };
    prop_assert_eq!(config.epsilon_at(0), start);
    prop_assert!((config.epsilon_at(decay) - start * frac).abs() < 1e-15);
    prop_assert_eq!(config.epsilon_at(decay + step), config.epsilon_at(decay));
    let e = config.epsilon_at(step);
    prop_assert!(e <= start + 1e-15 && e >= start * frac - 1e-15);
    prop_assert!(config.epsilon_at(step + 1) <= e + 1e-15);
    Ok(())
}
