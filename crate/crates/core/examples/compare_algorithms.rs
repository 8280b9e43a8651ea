//! Runs DQV, DQN and DDQN on one environment over several seeds through the
//! experiment harness, then writes record files, curves and an SVG chart.
//!
//! cargo run --release --example compare_algorithms -- [env] [episodes] [seeds]
//!
//! Output goes to `$DQV_OUTPUT_ROOT/compare-<env>` (default `runs/`).

use dqv::agents::Algorithm;
use dqv::harness::{run_experiment, ExperimentConfig};

fn main() -> dqv::Result<()> {
    let mut args = std::env::args().skip(1);
    let env = args.next().unwrap_or_else(|| "cartpole".into());
    let episodes = args.next().and_then(|s| s.parse().ok()).unwrap_or(300);
    let seeds: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);

    let mut config = ExperimentConfig::new(&env, &Algorithm::ALL, episodes);
    config.seeds = (0..seeds).collect();
    config.name = Some(format!("compare-{env}"));

    let outcome = run_experiment(&config)?;
    for s in &outcome.summaries {
        let solved: Vec<String> = s
            .episodes_to_threshold
            .iter()
            .map(|(seed, e)| format!("{seed}:{}", e.map_or("-".into(), |e| e.to_string())))
            .collect();
        println!(
            "{:<5} last smoothed mean {:>8.1}  episodes to threshold per seed [{}]",
            s.algorithm,
            s.smoothed.last().copied().unwrap_or(f64::NAN),
            solved.join(" ")
        );
    }
    println!("chart and records in {}", outcome.output_dir.display());
    Ok(())
}
