//! Checks backpropagation against central finite differences on random
//! networks and batches, masked and unmasked.
//!
//! cargo run --release --example gradient_check -- [configs] [seed]

use dqv::nn::gradcheck::{run_suite, RELATIVE_TOLERANCE};

fn main() -> dqv::Result<()> {
    let mut args = std::env::args().skip(1);
    let configs = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);

    let reports = run_suite(configs, seed)?;
    for r in &reports {
        println!(
            "{:?} batch {:>2} masked {:<5} compared {:>5} skipped {:>3}  max rel err {:.2e}",
            r.layer_sizes, r.batch, r.masked, r.compared, r.skipped_kinks, r.max_relative_error
        );
    }
    let worst = reports.iter().map(|r| r.max_relative_error).fold(0.0, f64::max);
    println!("worst {worst:.2e}, tolerance {RELATIVE_TOLERANCE:e}");
    Ok(())
}
