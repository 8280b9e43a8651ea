//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run alone with `cargo test --release --test acceptance`. The CartPole and
//! Acrobot campaigns train for several minutes; set `DQV_ACCEPTANCE_SKIP`
//! to a comma list of criterion numbers (e.g. `4,5,6`) to leave some out.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::mechanics;
use dqv::agents::Algorithm;
use dqv::envs::GridWorld;
use dqv::harness::{run_experiment, CurveSummary, ExperimentConfig};
use dqv::nn::gradcheck;
use dqv::tabular::{
    greedy_path, policy_agreement, train_gridworld, value_iteration, TabularAlgorithm, TabularRunConfig,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestError, TestRunner};

enum Verdict {
    Pass(String),
    Fail(String),
    /// Reported but not counted as a failure.
    Flag(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn gradients() -> Verdict {
    let started = Instant::now();
    let reports = match gradcheck::run_suite(50, 0) {
        Ok(r) => r,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let elapsed = started.elapsed();
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let worst = reports.iter().map(|r| r.max_relative_error).fold(0.0, f64::max);
    verdict(
        reports.len() == 50 && failed == 0 && elapsed < Duration::from_secs(60),
        format!(
            "{} configurations, {failed} failed, worst relative error {worst:.2e}, {:.1}s",
            reports.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn tabular() -> Verdict {
    let maze = GridWorld::dyna_maze();
    let mut ok = true;
    let mut parts = Vec::new();
    for (algorithm, label) in [(TabularAlgorithm::QvLambda, "QV(lambda)"), (TabularAlgorithm::QLearning, "Q-learning")] {
        let mut agreements = Vec::new();
        let mut slowest: f64 = 0.0;
        for seed in 0..5 {
            let config = TabularRunConfig::new(algorithm, seed);
            let started = Instant::now();
            let oracle = value_iteration(&maze.model(), config.gamma, 1e-12).unwrap();
            let path = greedy_path(&maze, &oracle.policy);
            let report = train_gridworld(&maze, &config).unwrap();
            let agreement = policy_agreement(&report.greedy_policy, &oracle, &path);
            slowest = slowest.max(started.elapsed().as_secs_f64());
            ok &= agreement >= 0.95 && slowest < 30.0;
            agreements.push(format!("{:.0}%", agreement * 100.0));
        }
        parts.push(format!("{label} [{}] slowest {slowest:.2}s", agreements.join(" ")));
    }
    verdict(ok, parts.join("; "))
}

fn hand_traces() -> Verdict {
    let qv = common::traces::qv_chain_deviation();
    let dqv = common::traces::dqv_step_deviation();
    verdict(
        qv < 1e-12 && dqv < 1e-12,
        format!("QV(lambda) chain deviation {qv:.1e}, DQV step deviation {dqv:.1e}"),
    )
}

fn campaign(env: &str, algorithms: &[Algorithm], episodes: usize) -> Result<(Vec<CurveSummary>, f64), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut config = ExperimentConfig::new(env, algorithms, episodes);
    config.output_dir = Some(dir.path().to_path_buf());
    config.stop_on_solve = true;
    let started = Instant::now();
    let outcome = run_experiment(&config).map_err(|e| e.to_string())?;
    Ok((outcome.summaries, started.elapsed().as_secs_f64()))
}

fn describe(s: &CurveSummary) -> String {
    let per_seed: Vec<String> = s
        .episodes_to_threshold
        .iter()
        .map(|(seed, e)| format!("{seed}:{}", e.map_or("-".to_string(), |e| e.to_string())))
        .collect();
    format!("{} solved {}/5 [{}]", s.algorithm, s.solved_seeds(), per_seed.join(" "))
}

fn learning(summaries: &Result<(Vec<CurveSummary>, f64), String>, limit_secs: Option<f64>) -> Verdict {
    match summaries {
        Err(e) => Verdict::Fail(e.clone()),
        Ok((summaries, secs)) => {
            let dqv = summaries.iter().find(|s| s.algorithm == Algorithm::Dqv).unwrap();
            verdict(
                dqv.solved_seeds() >= 3 && limit_secs.is_none_or(|l| *secs < l),
                format!("{} in {secs:.0}s", describe(dqv)),
            )
        }
    }
}

fn median_comparison(summaries: &Result<(Vec<CurveSummary>, f64), String>) -> Verdict {
    let Ok((summaries, _)) = summaries else {
        return Verdict::Fail("CartPole campaign failed".into());
    };
    let median = |alg| {
        summaries
            .iter()
            .find(|s| s.algorithm == alg)
            .and_then(CurveSummary::median_episodes_to_threshold)
    };
    let show = |m: Option<f64>| m.map_or("never".to_string(), |m| m.to_string());
    let (dqv, dqn) = (median(Algorithm::Dqv), median(Algorithm::Dqn));
    let detail = format!("median episodes to threshold: DQV {}, DQN {}", show(dqv), show(dqn));
    // an unsolved median counts as infinitely late
    let dqv_first = match (dqv, dqn) {
        (Some(a), Some(b)) => a <= b,
        (Some(_), None) => true,
        (None, _) => false,
    };
    if dqv_first {
        Verdict::Pass(detail)
    } else {
        Verdict::Flag(format!("{detail} (ordering reversed)"))
    }
}

fn msg<T: std::fmt::Debug>(r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| format!("{e:?}"))
}

fn mechanics_properties() -> Verdict {
    let mut runner = TestRunner::new(Config {
        cases: 64,
        failure_persistence: None,
        ..Config::default()
    });
    let mut failures = Vec::new();
    let mut record = |name: &str, result: Result<(), String>| {
        if let Err(e) = result {
            failures.push(format!("{name}: {e}"));
        }
    };
    record("FIFO", msg(runner.run(&(1usize..50, 0usize..200), |(c, p)| mechanics::fifo(c, p))));
    record(
        "warmup",
        msg(runner.run(&(16usize..120, 1usize..6, any::<u64>()), |(w, e, s)| mechanics::warmup(w, e, s))),
    );
    record(
        "terminal y = r",
        msg(runner.run(&(mechanics::batch_strategy(), any::<u64>()), |(b, s)| {
            mechanics::terminal_target(&b, s)
        })),
    );
    record(
        "shared DQV target",
        msg(runner.run(&(mechanics::batch_strategy(), any::<u64>()), |(b, s)| {
            mechanics::shared_target(&b, s)
        })),
    );
    record(
        "target freeze/sync",
        msg(runner.run(
            &(1u64..8, 1u64..30, any::<u64>(), mechanics::batch_strategy()),
            |(p, n, s, b)| mechanics::target_sync(p, n, s, &b),
        )),
    );
    record(
        "reward clipping",
        msg(runner.run(&(-5i32..=1, -1i32..20, any::<u64>()), |(r, g, s)| {
            mechanics::reward_clipping(r, g, s)
        })),
    );
    record(
        "epsilon endpoints",
        msg(runner.run(
            &(0.0f64..=1.0, 0.0f64..=1.0, 1u64..50_000, 0u64..100_000),
            |(a, f, d, s)| mechanics::epsilon_endpoints(a, f, d, s),
        )),
    );
    if failures.is_empty() {
        Verdict::Pass("FIFO, warmup, terminal y = r, shared DQV target, target freeze/sync, reward clipping, epsilon endpoints; 64 cases each".into())
    } else {
        Verdict::Fail(failures.join("; "))
    }
}

fn smoothing() -> Verdict {
    let worst = common::savgol_worst_error();
    verdict(worst < 1e-9, format!("100 random series, worst deviation {worst:.1e}"))
}

fn main() -> ExitCode {
    let skip: Vec<u32> = std::env::var("DQV_ACCEPTANCE_SKIP")
        .unwrap_or_default()
        .split(',')
        .filter_map(|s| s.trim().parse().ok())
        .collect();
    let wanted = |n: u32| !skip.contains(&n);

    let cartpole = (wanted(4) || wanted(6))
        .then(|| campaign("cartpole", &[Algorithm::Dqv, Algorithm::Dqn], 1000));
    let checks: Vec<(u32, &str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        (1, "gradient finite differences", Box::new(gradients)),
        (2, "tabular oracle agreement", Box::new(tabular)),
        (3, "hand-trace vectors", Box::new(hand_traces)),
        (4, "CartPole DQV reaches 195", Box::new(|| learning(cartpole.as_ref().unwrap(), Some(1800.0)))),
        (5, "Acrobot DQV reaches -120", Box::new(|| learning(&campaign("acrobot", &[Algorithm::Dqv], 1500), None))),
        (6, "DQV median <= DQN median on CartPole", Box::new(|| median_comparison(cartpole.as_ref().unwrap()))),
        (7, "training-loop mechanics", Box::new(mechanics_properties)),
        (8, "Savitzky-Golay against least squares", Box::new(smoothing)),
    ];

    let mut failed = 0;
    for (n, name, check) in checks {
        if !wanted(n) {
            println!("SKIP {n} {name}");
            continue;
        }
        match check() {
            Verdict::Pass(d) => println!("PASS {n} {name}: {d}"),
            Verdict::Flag(d) => println!("FLAG {n} {name}: {d}"),
            Verdict::Fail(d) => {
                failed += 1;
                println!("FAIL {n} {name}: {d}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion/criteria failed");
        ExitCode::FAILURE
    }
}
