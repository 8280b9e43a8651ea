mod common;

use dqv::envs::GridWorld;
use dqv::tabular::{
    greedy_path, policy_agreement, train_gridworld, value_iteration, DiscreteTransition,
    LearningRate, QTable, TabularAlgorithm, TabularRunConfig, TabularValueStore,
};
use proptest::prelude::*;

fn tr(state: usize, action: usize, reward: f64, next_state: usize, terminal: bool) -> DiscreteTransition {
    DiscreteTransition {
        state,
        action,
        reward,
        next_state,
        terminal,
    }
}

#[test]
fn three_state_chain_hand_trace() {
    let deviation = common::traces::qv_chain_deviation();
    assert!(deviation < 1e-12, "deviation {deviation:e}");
}

#[test]
fn value_iteration_matches_shortest_paths() {
    let maze = GridWorld::dyna_maze();
    let gamma = 0.99;
    let oracle = value_iteration(&maze.model(), gamma, 1e-12).unwrap();
    let distances = maze.distances_to_goal();
    for cell in maze.open_cells() {
        let s = maze.index_of(cell);
        if cell == maze.goal() {
            continue;
        }
        let d = distances[s].expect("maze is connected") as i32;
        let expected = gamma.powi(d - 1);
        assert!(
            (oracle.v_star[s] - expected).abs() < 1e-10,
            "{cell:?}: {} vs {expected}",
            oracle.v_star[s]
        );
    }
    // the greedy oracle policy walks a shortest path
    let path = greedy_path(&maze, &oracle.policy);
    assert_eq!(path.len(), distances[maze.index_of(maze.start())].unwrap());
}

#[test]
fn qv_lambda_converges_with_inverse_visit_count() {
    let maze = GridWorld::dyna_maze();
    for seed in 0..5 {
        let mut config = TabularRunConfig::new(TabularAlgorithm::QvLambda, seed);
        config.learning_rate = LearningRate::InverseVisitCount;
        config.epsilon = 0.1;
        let oracle = value_iteration(&maze.model(), config.gamma, 1e-12).unwrap();
        let path = greedy_path(&maze, &oracle.policy);
        let report = train_gridworld(&maze, &config).unwrap();
        let agreement = policy_agreement(&report.greedy_policy, &oracle, &path);
        assert!(agreement >= 0.95, "seed {seed}: agreement {agreement}");
    }
}

#[test]
fn training_is_reproducible() {
    let maze = GridWorld::dyna_maze();
    let mut config = TabularRunConfig::new(TabularAlgorithm::QLearning, 9);
    config.steps = 5_000;
    let a = train_gridworld(&maze, &config).unwrap();
    let b = train_gridworld(&maze, &config).unwrap();
    assert_eq!(a.q_values, b.q_values);
    assert_eq!(a.episodes, b.episodes);
}

#[test]
fn q_learning_step_by_hand() {
    let mut q = QTable::new(2, 2);
    q.set(1, 0, 0.4);
    q.set(1, 1, 0.8);
    // 0 + 0.5 (0.2 + 0.9 * 0.8 - 0)
    q.q_learning_step(&tr(0, 1, 0.2, 1, false), 0.5, 0.9).unwrap();
    assert!((q.get(0, 1) - 0.46).abs() < 1e-12);
    q.q_learning_step(&tr(0, 1, 1.0, 1, true), 1.0, 0.9).unwrap();
    assert_eq!(q.get(0, 1), 1.0);
}

fn transitions(states: usize, actions: usize) -> impl Strategy<Value = Vec<DiscreteTransition>> {
    prop::collection::vec(
        (0..states, 0..actions, -1.0f64..1.0, 0..states, prop::bool::weighted(0.1)),
        1..60,
    )
    .prop_map(|v| v.into_iter().map(|(s, a, r, n, t)| tr(s, a, r, n, t)).collect())
}

proptest! {
    #[test]
    fn traces_stay_within_bounds(
        steps in transitions(6, 3),
        gamma in 0.0f64..0.99,
        lambda in 0.0f64..=1.0,
    ) {
        let mut store = TabularValueStore::new(6, 3, LearningRate::Constant(0.1), gamma, lambda).unwrap();
        let bound = 1.0 / (1.0 - gamma * lambda);
        for t in &steps {
            store.qv_lambda_step(t).unwrap();
            for s in 0..6 {
                let e = store.trace(s);
                prop_assert!((0.0..=bound + 1e-12).contains(&e), "trace {} above {}", e, bound);
            }
        }
    }

    #[test]
    fn untouched_traces_decay_by_gamma_lambda(
        k in 1usize..20,
        gamma in 0.1f64..0.99,
        lambda in 0.1f64..=1.0,
    ) {
        let mut store = TabularValueStore::new(3, 1, LearningRate::Constant(0.1), gamma, lambda).unwrap();
        store.qv_lambda_step(&tr(0, 0, 0.0, 1, false)).unwrap();
        for _ in 0..k {
            store.qv_lambda_step(&tr(1, 0, 0.0, 2, false)).unwrap();
        }
        let expected = (gamma * lambda).powi(k as i32);
        if expected >= dqv::tabular::TRACE_CUTOFF * 10.0 {
            prop_assert!((store.trace(0) - expected).abs() <= 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn lambda_zero_is_one_step_td(steps in transitions(5, 2)) {
        let mut store = TabularValueStore::new(5, 2, LearningRate::Constant(0.3), 0.9, 0.0).unwrap();
        for t in &steps {
            let before: Vec<f64> = (0..5).map(|s| store.v(s)).collect();
            store.qv_lambda_step(t).unwrap();
            for s in (0..5).filter(|&s| s != t.state) {
                prop_assert_eq!(store.v(s), before[s]);
            }
        }
    }
}
