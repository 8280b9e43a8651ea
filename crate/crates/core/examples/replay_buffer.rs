//! The replay memory on its own: warmup gating, FIFO eviction once full,
//! and uniform sampling with replacement.

use dqv::replay::{ReplayBuffer, Transition};

fn transition(i: usize) -> Transition {
    Transition {
        state: vec![i as f64],
        action: i % 2,
        reward: 1.0,
        next_state: vec![i as f64 + 1.0],
        terminal: false,
    }
}

fn main() -> dqv::Result<()> {
    let mut buffer = ReplayBuffer::new(5, 3, 42)?;
    for i in 0..8 {
        buffer.push(transition(i));
        let held: Vec<f64> = buffer.iter().map(|t| t.state[0]).collect();
        println!("push {i}: ready {:<5} contents {held:?}", buffer.ready());
    }

    let mut counts = [0usize; 8];
    for _ in 0..10_000 {
        for t in buffer.sample(4)? {
            counts[t.state[0] as usize] += 1;
        }
    }
    println!("sample frequencies over 40,000 draws: {counts:?}");
    Ok(())
}
