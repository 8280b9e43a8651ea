//! Central finite-difference check of the analytic backpropagation.
//!
//! The numeric side never touches [`Mlp::forward`] or the backward pass: it
//! re-evaluates the loss with a separate dense matrix-multiply written
//! against the raw parameter arrays. Parameters whose perturbation flips a
//! ReLU (the loss is not differentiable there) are skipped and counted.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mlp::Mlp;
use crate::error::Result;

/// While no ReLU changes sign, the squared loss is exactly quadratic in any
/// single parameter, so the central difference carries no truncation error
/// and the step only trades rounding noise (about `eps * loss / h`) against
/// how often a perturbation crosses a kink. At 1e-6 the noise alone exceeds
/// the tolerance for gradients near 1e-7.
pub const DEFAULT_STEP: f64 = 1e-3;
pub const RELATIVE_TOLERANCE: f64 = 1e-4;
/// Entries with `|analytic| + |numeric|` below this are not compared.
pub const MAGNITUDE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub layer_sizes: Vec<usize>,
    pub batch: usize,
    pub masked: bool,
    pub compared: usize,
    pub skipped_kinks: usize,
    pub max_relative_error: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_relative_error < RELATIVE_TOLERANCE
    }
}

/// Loss and hidden-unit sign pattern from a plain reference evaluation.
fn reference_loss(
    sizes: &[usize],
    weights: &[Vec<f64>],
    biases: &[Vec<f64>],
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    mask: Option<&[usize]>,
) -> (f64, Vec<bool>) {
    let layers = sizes.len() - 1;
    let mut pattern = Vec::new();
    let mut total = 0.0;
    for (i, (x, t)) in inputs.iter().zip(targets).enumerate() {
        let mut a = x.clone();
        for k in 0..layers {
            let mut z = vec![0.0; sizes[k + 1]];
            for r in 0..sizes[k + 1] {
                let mut acc = biases[k][r];
                for c in 0..sizes[k] {
                    acc += weights[k][r * sizes[k] + c] * a[c];
                }
                z[r] = acc;
            }
            if k + 1 < layers {
                for v in z.iter_mut() {
                    pattern.push(*v > 0.0);
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            }
            a = z;
        }
        let sample: f64 = match mask {
            Some(m) => (a[m[i]] - t[m[i]]).powi(2),
            None => a.iter().zip(t).map(|(o, t)| (o - t).powi(2)).sum(),
        };
        total += sample;
    }
    (total / inputs.len() as f64, pattern)
}

fn relative_error(analytic: f64, numeric: f64) -> Option<f64> {
    let scale = analytic.abs() + numeric.abs();
    if scale <= MAGNITUDE_FLOOR {
        None
    } else {
        Some((analytic - numeric).abs() / analytic.abs().max(numeric.abs()))
    }
}

/// Compares analytic gradients of `net` on one batch against central
/// differences with step `h` over every parameter.
pub fn check_network(
    net: &Mlp,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    mask: Option<&[usize]>,
    h: f64,
) -> Result<GradCheckReport> {
    let (_, analytic) = net.mse_loss_and_gradients(inputs, targets, mask)?;
    let sizes = net.layer_sizes().to_vec();
    let mut weights: Vec<Vec<f64>> = (0..net.num_layers()).map(|k| net.weights(k).to_vec()).collect();
    let mut biases: Vec<Vec<f64>> = (0..net.num_layers()).map(|k| net.biases(k).to_vec()).collect();

    let mut report = GradCheckReport {
        layer_sizes: sizes.clone(),
        batch: inputs.len(),
        masked: mask.is_some(),
        compared: 0,
        skipped_kinks: 0,
        max_relative_error: 0.0,
    };

    let probe = |report: &mut GradCheckReport,
                     weights: &mut Vec<Vec<f64>>,
                     biases: &mut Vec<Vec<f64>>,
                     is_bias: bool,
                     k: usize,
                     j: usize,
                     a: f64| {
        let slot = |w: &mut Vec<Vec<f64>>, b: &mut Vec<Vec<f64>>, v: f64| {
            if is_bias {
                b[k][j] = v
            } else {
                w[k][j] = v
            }
        };
        let orig = if is_bias { biases[k][j] } else { weights[k][j] };
        slot(weights, biases, orig + h);
        let (plus, pattern_plus) = reference_loss(&sizes, weights, biases, inputs, targets, mask);
        slot(weights, biases, orig - h);
        let (minus, pattern_minus) = reference_loss(&sizes, weights, biases, inputs, targets, mask);
        slot(weights, biases, orig);
        if pattern_plus != pattern_minus {
            report.skipped_kinks += 1;
            return;
        }
        let numeric = (plus - minus) / (2.0 * h);
        if let Some(err) = relative_error(a, numeric) {
            report.compared += 1;
            report.max_relative_error = report.max_relative_error.max(err);
        }
    };

    for k in 0..sizes.len() - 1 {
        for j in 0..weights[k].len() {
            probe(&mut report, &mut weights, &mut biases, false, k, j, analytic.weights[k][j]);
        }
        for j in 0..biases[k].len() {
            probe(&mut report, &mut weights, &mut biases, true, k, j, analytic.biases[k][j]);
        }
    }
    Ok(report)
}

/// One randomized configuration: sizes up to 8-32-32-4, batch up to 32,
/// alternating masked and unmasked losses.
pub fn random_case(index: usize, rng: &mut ChaCha8Rng) -> Result<GradCheckReport> {
    let sizes = [
        rng.gen_range(1..=8),
        rng.gen_range(1..=32),
        rng.gen_range(1..=32),
        rng.gen_range(1..=4),
    ];
    let batch = rng.gen_range(1..=32);
    let mut net = Mlp::new(&sizes, rng)?;
    for k in 0..net.num_layers() {
        for b in net.biases_mut(k) {
            *b = rng.gen_range(-0.5..0.5);
        }
    }
    let inputs: Vec<Vec<f64>> = (0..batch)
        .map(|_| (0..sizes[0]).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let targets: Vec<Vec<f64>> = (0..batch)
        .map(|_| (0..sizes[3]).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let mask: Option<Vec<usize>> =
        (index % 2 == 1).then(|| (0..batch).map(|_| rng.gen_range(0..sizes[3])).collect());
    check_network(&net, &inputs, &targets, mask.as_deref(), DEFAULT_STEP)
}

/// Runs `configs` randomized checks from `seed`.
pub fn run_suite(configs: usize, seed: u64) -> Result<Vec<GradCheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..configs).map(|i| random_case(i, &mut rng)).collect()
}
