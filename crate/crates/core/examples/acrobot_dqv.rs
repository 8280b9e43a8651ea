//! Trains DQV on Acrobot with the online (no replay, no target) preset and prints the
//! trailing-100 average every 50 episodes.
//!
//! cargo run --release --example acrobot_dqv -- [seed] [episodes]

use dqv::agents::{AgentConfig, Algorithm, Preset, Trainer};
use dqv::envs::{Acrobot, Environment};
use dqv::rng::split_seed;

fn main() -> dqv::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let episodes: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1500);
    let algorithm: Algorithm = args.next().and_then(|s| s.parse().ok()).unwrap_or(Algorithm::Dqv);

    let mut env = Acrobot::new();
    let config = AgentConfig::preset(Preset::Acrobot, algorithm);
    let mut trainer = Trainer::new(config, env.spec(), seed, split_seed(0, algorithm.id(), seed))?;
    let started = std::time::Instant::now();
    let mut returns = Vec::with_capacity(episodes);
    for episode in 0..episodes {
        let record = trainer.run_episode(&mut env)?;
        returns.push(record.raw_return);
        let window = &returns[returns.len().saturating_sub(100)..];
        let avg = window.iter().sum::<f64>() / window.len() as f64;
        if (episode + 1) % 50 == 0 {
            println!(
                "episode {:>5}  return {:>6.1}  trailing-100 {:>6.1}  ε {:.3}  {:.1}s",
                episode + 1,
                record.raw_return,
                avg,
                trainer.epsilon(),
                started.elapsed().as_secs_f64()
            );
        }
        if window.len() == 100 && avg >= -120.0 {
            println!("solved at episode {}", episode + 1);
            break;
        }
    }
    Ok(())
}
