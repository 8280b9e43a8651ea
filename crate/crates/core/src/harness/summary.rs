use serde::{Deserialize, Serialize};

use super::records::Stream;
use super::savgol::savgol_smooth;
use crate::agents::Algorithm;
use crate::error::{Error, Result};

/// Episodes in the trailing average that decides whether a task is solved.
pub const SOLVE_WINDOW: usize = 100;

/// Aggregate learning curve of one algorithm on one environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub environment: String,
    pub algorithm: Algorithm,
    /// Seeds contributing to each episode. Streams stopped early (for
    /// example on solve) simply stop contributing.
    pub count: Vec<usize>,
    /// Per-episode mean return over the contributing seeds.
    pub mean: Vec<f64>,
    /// Population standard deviation over the contributing seeds.
    pub std: Vec<f64>,
    /// Savitzky–Golay smoothed `mean`, same length.
    pub smoothed: Vec<f64>,
    pub threshold: Option<f64>,
    /// `(seed, episodes)`: the number of episodes after which the trailing
    /// average first reached `threshold`, if it did.
    pub episodes_to_threshold: Vec<(u64, Option<usize>)>,
}

impl CurveSummary {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn solved_seeds(&self) -> usize {
        self.episodes_to_threshold
            .iter()
            .filter(|(_, e)| e.is_some())
            .count()
    }

    /// Median of the per-seed episodes-to-threshold, with unsolved seeds
    /// ranked last (as `+∞`). `None` when the median seed did not solve.
    pub fn median_episodes_to_threshold(&self) -> Option<f64> {
        let mut values: Vec<f64> = self
            .episodes_to_threshold
            .iter()
            .map(|(_, e)| e.map_or(f64::INFINITY, |e| e as f64))
            .collect();
        if values.is_empty() {
            return None;
        }
        values.sort_by(f64::total_cmp);
        let n = values.len();
        let median = if n % 2 == 1 {
            values[n / 2]
        } else {
            0.5 * (values[n / 2 - 1] + values[n / 2])
        };
        median.is_finite().then_some(median)
    }
}

/// Trailing averages over at most `window` episodes ending at each index.
pub fn trailing_mean(returns: &[f64], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(returns.len());
    let mut sum = 0.0;
    for (i, r) in returns.iter().enumerate() {
        sum += r;
        if i >= window {
            sum -= returns[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

/// Number of episodes after which the trailing average over a full
/// [`SOLVE_WINDOW`] first reaches `threshold`.
pub fn episodes_to_threshold(returns: &[f64], threshold: f64) -> Option<usize> {
    // Summing the window afresh keeps the decision free of running-sum drift.
    (SOLVE_WINDOW..=returns.len()).find(|&end| {
        let window = &returns[end - SOLVE_WINDOW..end];
        window.iter().sum::<f64>() / SOLVE_WINDOW as f64 >= threshold
    })
}

/// Smooths with the largest usable odd window when the curve is shorter
/// than `window`; curves too short for any fit are returned unchanged.
pub fn smooth_curve(series: &[f64], window: usize, order: usize) -> Result<Vec<f64>> {
    let mut w = window.min(series.len());
    if w % 2 == 0 {
        w = w.saturating_sub(1);
    }
    if w <= order {
        return Ok(series.to_vec());
    }
    savgol_smooth(series, w, order)
}

/// Builds one summary from every stream of `algorithm`.
pub fn summarize(
    environment: &str,
    algorithm: Algorithm,
    streams: &[&Stream],
    threshold: Option<f64>,
    window: usize,
    order: usize,
) -> Result<CurveSummary> {
    if streams.is_empty() {
        return Err(Error::InsufficientData {
            requested: 1,
            available: 0,
        });
    }
    if let Some(s) = streams.iter().find(|s| s.algorithm != algorithm) {
        return Err(Error::contract(format!(
            "stream for {} passed to the {algorithm} summary",
            s.algorithm
        )));
    }
    let returns: Vec<Vec<f64>> = streams.iter().map(|s| s.returns()).collect();
    let longest = returns.iter().map(Vec::len).max().unwrap_or(0);
    let mut count = Vec::with_capacity(longest);
    let mut mean = Vec::with_capacity(longest);
    let mut std = Vec::with_capacity(longest);
    for e in 0..longest {
        let values: Vec<f64> = returns.iter().filter_map(|r| r.get(e).copied()).collect();
        let n = values.len() as f64;
        let m = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
        count.push(values.len());
        mean.push(m);
        std.push(var.sqrt());
    }
    let smoothed = smooth_curve(&mean, window, order)?;
    let episodes_to_threshold = streams
        .iter()
        .zip(&returns)
        .map(|(s, r)| (s.seed, threshold.and_then(|t| episodes_to_threshold(r, t))))
        .collect();
    Ok(CurveSummary {
        environment: environment.to_string(),
        algorithm,
        count,
        mean,
        std,
        smoothed,
        threshold,
        episodes_to_threshold,
    })
}
