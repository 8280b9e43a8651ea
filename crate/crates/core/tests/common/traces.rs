//! Updates worked out by hand once and frozen as test vectors.

use dqv::agents::{Agent, DqvAgent};
use dqv::nn::{Mlp, OptimizerConfig};
use dqv::replay::Transition;
use dqv::tabular::{DiscreteTransition, LearningRate, TabularValueStore};

fn tr(state: usize, action: usize, reward: f64, next_state: usize, terminal: bool) -> DiscreteTransition {
    DiscreteTransition {
        state,
        action,
        reward,
        next_state,
        terminal,
    }
}

fn worst(got: &[f64], want: &[f64]) -> f64 {
    got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// QV(λ) with α = 0.5, γ = 0.9, λ = 0.8 on the chain 0 -> 1 -> 2 (terminal),
/// starting from V = [0.2, 0.5, 0] and Q(0,1) = 0.1, all else zero.
///
/// step 1 (s=0, a=1, r=0, s'=1): y = 0.9 * 0.5 = 0.45
///   Q(0,1) = 0.1 + 0.5 (0.45 - 0.1) = 0.275
///   e = {0: 1};  δ = 0.45 - 0.2 = 0.25;  V(0) = 0.2 + 0.5 * 0.25 = 0.325
/// step 2 (s=1, a=0, r=1, terminal): y = 1
///   Q(1,0) = 0 + 0.5 (1 - 0) = 0.5
///   e = {0: 0.72, 1: 1};  δ = 1 - 0.5 = 0.5
///   V(0) = 0.325 + 0.5 * 0.5 * 0.72 = 0.505;  V(1) = 0.5 + 0.5 * 0.5 = 0.75
///
/// Returns the largest deviation from those numbers over both steps.
pub fn qv_chain_deviation() -> f64 {
    let mut store = TabularValueStore::new(3, 2, LearningRate::Constant(0.5), 0.9, 0.8).unwrap();
    store.set_v(0, 0.2);
    store.set_v(1, 0.5);
    store.set_q(0, 1, 0.1);

    store.qv_lambda_step(&tr(0, 1, 0.0, 1, false)).unwrap();
    let one = [store.v(0), store.v(1), store.v(2), store.q(0, 1), store.q(1, 0), store.trace(0)];
    let step_one = worst(&one, &[0.325, 0.5, 0.0, 0.275, 0.0, 1.0]);

    store.qv_lambda_step(&tr(1, 0, 1.0, 2, true)).unwrap();
    let two = [
        store.v(0),
        store.v(1),
        store.v(2),
        store.q(0, 0),
        store.q(0, 1),
        store.q(1, 0),
        store.q(1, 1),
        store.trace(0),
        store.trace(1),
    ];
    let step_two = worst(&two, &[0.505, 0.75, 0.0, 0.0, 0.275, 0.5, 0.0, 0.0, 0.0]);
    step_one.max(step_two)
}

/// One DQV step with plain SGD (rate 0.1), γ = 0.9 and no target network.
///
/// Q: linear 1 -> 2 with W = [0.5, -0.3], b = [0.1, 0.2]
/// V: linear 1 -> 1 with W = [0.4], b = [0]
/// transition s = [1], a = 1, r = 0.5, s' = [2], not terminal
///
/// y = 0.5 + 0.9 * V(2) = 0.5 + 0.9 * 0.8 = 1.22
/// Q(s, 1) = -0.3 + 0.2 = -0.1;  loss = 1.32²;  dL/dQ = 2 (-0.1 - 1.22) = -2.64
///   W[1] = -0.3 + 0.264 = -0.036,  b[1] = 0.2 + 0.264 = 0.464, row 0 untouched
/// V(s) = 0.4;  loss = 0.82²;  dL/dV = 2 (0.4 - 1.22) = -1.64
///   W = 0.4 + 0.164 = 0.564,  b = 0.164
pub fn dqv_step_deviation() -> f64 {
    let q = Mlp::from_parameters(&[1, 2], vec![vec![0.5, -0.3]], vec![vec![0.1, 0.2]]).unwrap();
    let v = Mlp::from_parameters(&[1, 1], vec![vec![0.4]], vec![vec![0.0]]).unwrap();
    let mut agent = DqvAgent::from_networks(q, v, OptimizerConfig::sgd(0.1), 0.9, None).unwrap();
    let t = Transition {
        state: vec![1.0],
        action: 1,
        reward: 0.5,
        next_state: vec![2.0],
        terminal: false,
    };
    let stats = agent.train_on_batch(&[&t]).unwrap();
    let got = [
        stats.q_loss,
        stats.v_loss.unwrap(),
        agent.q_net().weights(0)[0],
        agent.q_net().weights(0)[1],
        agent.q_net().biases(0)[0],
        agent.q_net().biases(0)[1],
        agent.v_net().weights(0)[0],
        agent.v_net().biases(0)[0],
    ];
    worst(&got, &[1.32 * 1.32, 0.82 * 0.82, 0.5, -0.036, 0.1, 0.464, 0.564, 0.164])
}
