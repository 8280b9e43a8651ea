//! Smooths a noisy synthetic learning curve the way the harness smooths
//! mean returns, and shows that a cubic passes through unchanged.
//!
//! cargo run --example savgol -- [window] [order]

use dqv::harness::savgol_smooth;
use rand::Rng;

fn main() -> dqv::Result<()> {
    let mut args = std::env::args().skip(1);
    let window = args.next().and_then(|s| s.parse().ok()).unwrap_or(21);
    let order = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);

    let mut rng = dqv::rng::stream_rng(7);
    let curve: Vec<f64> = (0..200)
        .map(|e| {
            let trend = 500.0 / (1.0 + (-(e as f64 - 100.0) / 20.0).exp());
            trend + rng.gen_range(-80.0..80.0)
        })
        .collect();
    let smoothed = savgol_smooth(&curve, window, order)?;
    for e in (0..200).step_by(10) {
        println!("episode {:>3}  raw {:>7.1}  smoothed {:>7.1}", e + 1, curve[e], smoothed[e]);
    }

    let cubic: Vec<f64> = (0..50).map(|i| (i as f64 - 20.0).powi(3) / 100.0).collect();
    let worst = savgol_smooth(&cubic, window, order)?
        .iter()
        .zip(&cubic)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("largest change to a cubic: {worst:.1e}");
    Ok(())
}
