//! Solves the shipped maze (or a map file) exactly and prints V* and the
//! greedy policy next to the shortest-path distances they imply.
//!
//! cargo run --example value_iteration -- [map-file] [gamma]

use dqv::envs::GridWorld;
use dqv::tabular::{render_policy, render_values, value_iteration};

fn main() -> dqv::Result<()> {
    let mut args = std::env::args().skip(1);
    let maze = match args.next() {
        Some(path) => GridWorld::load(path)?,
        None => GridWorld::dyna_maze(),
    };
    let gamma: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.95);

    let oracle = value_iteration(&maze.model(), gamma, 1e-12)?;
    println!("{} sweeps, final residual {:.1e}\n", oracle.iterations, oracle.residual);
    print!("{}", render_values(&maze, &oracle.v_star));
    println!();
    print!("{}", render_policy(&maze, &oracle.policy));

    // With reward only on entering the goal, a cell d moves away is worth γ^(d-1).
    if maze.slip_probability() == 0.0 && maze.step_reward() == 0.0 {
        let start = maze.index_of(maze.start());
        let d = maze.distances_to_goal()[start].expect("maps are connected");
        println!(
            "\nstart is {d} moves from the goal: V*(start) = {:.6}, gamma^(d-1) * goal_reward = {:.6}",
            oracle.v_star[start],
            gamma.powi(d as i32 - 1) * maze.goal_reward()
        );
    }
    Ok(())
}
