//! Trains a few CartPole episodes, checkpoints the whole trainer to disk,
//! and shows that the resumed run continues exactly like an uninterrupted
//! one.

use dqv::agents::{AgentConfig, Algorithm, Preset, Trainer, TrainerCheckpoint};
use dqv::envs::{CartPole, Environment};

fn main() -> dqv::Result<()> {
    let mut env = CartPole::new();
    let config = AgentConfig::preset(Preset::CartPole, Algorithm::Dqv);

    let mut straight = Trainer::new(config.clone(), env.spec(), 0, 99)?;
    let mut interrupted = Trainer::new(config, env.spec(), 0, 99)?;
    for _ in 0..30 {
        straight.run_episode(&mut env)?;
        interrupted.run_episode(&mut env)?;
    }

    let path = std::env::temp_dir().join("dqv-trainer-checkpoint.json");
    interrupted.checkpoint().save(&path)?;
    drop(interrupted);
    let mut resumed = Trainer::from_checkpoint(TrainerCheckpoint::load(&path)?)?;
    println!(
        "checkpoint {} ({} bytes)",
        path.display(),
        std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0)
    );

    for _ in 0..10 {
        let a = straight.run_episode(&mut env)?;
        let b = resumed.run_episode(&mut env)?;
        println!(
            "episode {:>2}: uninterrupted {:>5} resumed {:>5}",
            a.episode, a.raw_return, b.raw_return
        );
        assert_eq!(a.raw_return, b.raw_return);
    }
    std::fs::remove_file(&path).ok();
    Ok(())
}
