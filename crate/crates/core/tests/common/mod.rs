#![allow(dead_code)]

pub mod mechanics;
pub mod traces;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Least-squares polynomial fit of `ys` at positions `xs`, solved through
/// the normal equations with partial-pivot Gaussian elimination.
fn polyfit(xs: &[f64], ys: &[f64], order: usize) -> Vec<f64> {
    let m = order + 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for (&x, &y) in xs.iter().zip(ys) {
        for r in 0..m {
            for c in 0..m {
                a[r][c] += x.powi((r + c) as i32);
            }
            a[r][m] += x.powi(r as i32) * y;
        }
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            for k in col..=m {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut coef = vec![0.0; m];
    for row in (0..m).rev() {
        let tail: f64 = (row + 1..m).map(|k| a[row][k] * coef[k]).sum();
        coef[row] = (a[row][m] - tail) / a[row][row];
    }
    coef
}

/// Savitzky-Golay smoothing computed the slow way: for every output point,
/// fit a polynomial to its own window and evaluate it there. Interior
/// points use the centred window; the first and last `window / 2` points
/// reuse the fit of the first and last full window.
pub fn savgol_oracle(series: &[f64], window: usize, order: usize) -> Vec<f64> {
    let n = series.len();
    let half = window / 2;
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(half).min(n - window);
            let xs: Vec<f64> = (0..window)
                .map(|k| (k as f64 - half as f64) / half.max(1) as f64)
                .collect();
            let coef = polyfit(&xs, &series[start..start + window], order);
            let x = (i as f64 - start as f64 - half as f64) / half.max(1) as f64;
            coef.iter().enumerate().map(|(p, c)| c * x.powi(p as i32)).sum()
        })
        .collect()
}

/// `(series, window, order)` for case `index` of a reproducible random set.
pub fn random_savgol_case(index: u64) -> (Vec<f64>, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + index);
    let window = 2 * rng.gen_range(1..=15) + 1;
    let order = rng.gen_range(0..window.min(6));
    let len = rng.gen_range(window..=300);
    let scale = [1.0, 50.0, 500.0][rng.gen_range(0..3)];
    let series = (0..len).map(|_| rng.gen_range(-scale..scale)).collect();
    (series, window, order)
}

/// Largest absolute difference between the library and the oracle over 100
/// random series.
pub fn savgol_worst_error() -> f64 {
    (0..100)
        .map(|i| {
            let (series, window, order) = random_savgol_case(i);
            let fast = dqv::harness::savgol_smooth(&series, window, order).unwrap();
            let slow = savgol_oracle(&series, window, order);
            fast.iter()
                .zip(&slow)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}
