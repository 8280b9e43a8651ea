//! Tabular QV(λ) and Q-learning on the 9×6 maze, scored against the
//! value-iteration policy on the states along the optimal path.
//!
//! cargo run --release --example qv_lambda_gridworld -- [seeds]

use dqv::envs::GridWorld;
use dqv::tabular::{
    greedy_path, policy_agreement, render_policy, train_gridworld, value_iteration,
    TabularAlgorithm, TabularRunConfig,
};

fn main() -> dqv::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let maze = GridWorld::dyna_maze();

    for algorithm in [TabularAlgorithm::QvLambda, TabularAlgorithm::QLearning] {
        println!("{algorithm:?}");
        for seed in 0..seeds {
            let config = TabularRunConfig::new(algorithm, seed);
            let oracle = value_iteration(&maze.model(), config.gamma, 1e-12)?;
            let on_path = greedy_path(&maze, &oracle.policy);
            let started = std::time::Instant::now();
            let report = train_gridworld(&maze, &config)?;
            let agreement = policy_agreement(&report.greedy_policy, &oracle, &on_path);
            println!(
                "  seed {seed}: {} episodes in {} steps, agreement {:.1}% on {} path states ({:.2}s)",
                report.episodes,
                report.steps,
                100.0 * agreement,
                on_path.len(),
                started.elapsed().as_secs_f64()
            );
            if seed == 0 {
                for line in render_policy(&maze, &report.greedy_policy).lines() {
                    println!("    {line}");
                }
            }
        }
    }
    Ok(())
}
