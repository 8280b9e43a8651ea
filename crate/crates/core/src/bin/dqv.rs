use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dqv::envs::GridWorld;
use dqv::harness::{self, ExperimentConfig, OUTPUT_ROOT_VAR};
use dqv::nn::gradcheck;
use dqv::tabular::{render_policy, render_values, value_iteration};

#[derive(Parser)]
#[command(name = "dqv", version, about = "Deep Quality-Value learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every (algorithm, seed) stream of an experiment config.
    Run {
        /// TOML experiment config (see crates/core/configs/).
        config: PathBuf,
        /// Override a config key, e.g. `--set episodes=200` or
        /// `--set agent.optimizer.learning_rate=5e-4`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Root for runs whose config names no output_dir; the run is written
        /// to <root>/<name or env>.
        #[arg(long, env = OUTPUT_ROOT_VAR, default_value = harness::DEFAULT_OUTPUT_ROOT)]
        output_root: PathBuf,
    },
    /// Rebuild curves and charts from the records of a previous run.
    Plot {
        /// Run directory written by `dqv run`.
        run_dir: PathBuf,
        /// Savitzky-Golay window; defaults to the one stored with the run.
        #[arg(long, requires = "order")]
        window: Option<usize>,
        /// Savitzky-Golay polynomial order.
        #[arg(long, requires = "window")]
        order: Option<usize>,
    },
    /// Compare backpropagated gradients with central finite differences.
    CheckGradients {
        /// Number of random network/batch configurations.
        #[arg(long, default_value_t = 50)]
        configs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve a gridworld map exactly with value iteration.
    Oracle {
        /// Map file; defaults to the shipped 9x6 maze.
        map: Option<PathBuf>,
        #[arg(long, default_value_t = 0.99)]
        gamma: f64,
        /// Stop when the largest Bellman residual falls below this.
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
}

fn run(cli: Cli) -> dqv::Result<bool> {
    match cli.command {
        Command::Run {
            config,
            overrides,
            output_root,
        } => {
            let mut config = ExperimentConfig::load(&config, &overrides)?;
            if config.output_dir.is_none() {
                config.output_dir =
                    Some(output_root.join(config.name.clone().unwrap_or_else(|| config.env.clone())));
            }
            eprintln!(
                "{}: {} algorithm(s) x {} seed(s) x {} episodes -> {}",
                config.env,
                config.algorithms.len(),
                config.seeds.len(),
                config.episodes,
                config.output_dir().display()
            );
            let outcome = harness::run_experiment(&config)?;
            for s in &outcome.summaries {
                let tail = &s.mean[s.len().saturating_sub(harness::SOLVE_WINDOW)..];
                let last = tail.iter().sum::<f64>() / tail.len() as f64;
                let median = s
                    .median_episodes_to_threshold()
                    .map_or("-".to_string(), |m| m.to_string());
                println!(
                    "{:<5} final trailing-100 mean {last:>8.2}  solved {}/{}  median episodes to threshold {median}",
                    s.algorithm,
                    s.solved_seeds(),
                    s.episodes_to_threshold.len()
                );
            }
            println!("wrote {}", outcome.output_dir.display());
            Ok(true)
        }
        Command::Plot {
            run_dir,
            window,
            order,
        } => {
            let summaries = harness::replot(&run_dir, window.zip(order))?;
            for s in &summaries {
                println!("{:<5} {} episodes", s.algorithm, s.len());
            }
            println!("wrote charts to {}", run_dir.display());
            Ok(true)
        }
        Command::CheckGradients { configs, seed } => {
            let reports = gradcheck::run_suite(configs, seed)?;
            let mut worst: f64 = 0.0;
            for (i, r) in reports.iter().enumerate() {
                worst = worst.max(r.max_relative_error);
                println!(
                    "{i:>3} sizes {:?} batch {:>2} {} compared {:>5} kinks {:>3} max rel err {:.3e}{}",
                    r.layer_sizes,
                    r.batch,
                    if r.masked { "masked  " } else { "unmasked" },
                    r.compared,
                    r.skipped_kinks,
                    r.max_relative_error,
                    if r.passed() { "" } else { "  FAIL" }
                );
            }
            let passed = reports.iter().all(|r| r.passed());
            println!(
                "{} configurations, worst relative error {worst:.3e} (tolerance {:e}): {}",
                reports.len(),
                gradcheck::RELATIVE_TOLERANCE,
                if passed { "PASS" } else { "FAIL" }
            );
            Ok(passed)
        }
        Command::Oracle {
            map,
            gamma,
            tolerance,
        } => {
            let maze = match &map {
                Some(path) => GridWorld::load(path)?,
                None => GridWorld::dyna_maze(),
            };
            let result = value_iteration(&maze.model(), gamma, tolerance)?;
            println!(
                "value iteration: {} sweeps, residual {:.3e}",
                result.iterations, result.residual
            );
            println!("\nV*:\n{}", render_values(&maze, &result.v_star));
            println!("greedy policy:\n{}", render_policy(&maze, &result.policy));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
