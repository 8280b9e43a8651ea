use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::summary::CurveSummary;
use crate::agents::Algorithm;
use crate::error::{Error, Result};

pub const CURVES_FILE: &str = "curves.csv";
pub const THRESHOLDS_FILE: &str = "thresholds.csv";

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 130.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Serialize, Deserialize)]
struct CurveRow {
    environment: String,
    algorithm: Algorithm,
    episode: usize,
    count: usize,
    mean: f64,
    std: f64,
    smoothed: f64,
    threshold: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ThresholdRow {
    environment: String,
    algorithm: Algorithm,
    seed: u64,
    episodes: Option<usize>,
}

/// Writes `<env>.svg` per environment plus `curves.csv` and
/// `thresholds.csv` holding every number in `summaries`. Returns the paths
/// written.
pub fn emit_charts(summaries: &[CurveSummary], dir: &Path) -> Result<Vec<PathBuf>> {
    if summaries.is_empty() {
        return Err(Error::contract("no summaries to chart"));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let mut by_env: BTreeMap<&str, Vec<&CurveSummary>> = BTreeMap::new();
    for s in summaries {
        by_env.entry(&s.environment).or_default().push(s);
    }
    for (env, group) in &by_env {
        let path = dir.join(format!("{env}.svg"));
        fs::write(&path, render_svg(env, group)).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }

    let curves_path = dir.join(CURVES_FILE);
    let mut curves = csv::Writer::from_path(&curves_path).map_err(|e| csv_error(&curves_path, e))?;
    for s in summaries {
        for e in 0..s.len() {
            curves
                .serialize(CurveRow {
                    environment: s.environment.clone(),
                    algorithm: s.algorithm,
                    episode: e + 1,
                    count: s.count[e],
                    mean: s.mean[e],
                    std: s.std[e],
                    smoothed: s.smoothed[e],
                    threshold: s.threshold,
                })
                .map_err(|err| csv_error(&curves_path, err))?;
        }
    }
    curves.flush().map_err(|e| Error::io(&curves_path, e))?;
    written.push(curves_path);

    let thresholds_path = dir.join(THRESHOLDS_FILE);
    let mut thresholds =
        csv::Writer::from_path(&thresholds_path).map_err(|e| csv_error(&thresholds_path, e))?;
    for s in summaries {
        for &(seed, episodes) in &s.episodes_to_threshold {
            thresholds
                .serialize(ThresholdRow {
                    environment: s.environment.clone(),
                    algorithm: s.algorithm,
                    seed,
                    episodes,
                })
                .map_err(|err| csv_error(&thresholds_path, err))?;
        }
    }
    thresholds.flush().map_err(|e| Error::io(&thresholds_path, e))?;
    written.push(thresholds_path);
    Ok(written)
}

/// Rebuilds the summaries written by [`emit_charts`], in their original order.
pub fn read_summaries(dir: &Path) -> Result<Vec<CurveSummary>> {
    let curves_path = dir.join(CURVES_FILE);
    let mut summaries: Vec<CurveSummary> = Vec::new();
    let mut reader = csv::Reader::from_path(&curves_path).map_err(|e| csv_error(&curves_path, e))?;
    for row in reader.deserialize() {
        let row: CurveRow = row.map_err(|e| csv_error(&curves_path, e))?;
        let fresh = summaries
            .last()
            .is_none_or(|s| s.environment != row.environment || s.algorithm != row.algorithm);
        if fresh {
            summaries.push(CurveSummary {
                environment: row.environment.clone(),
                algorithm: row.algorithm,
                count: Vec::new(),
                mean: Vec::new(),
                std: Vec::new(),
                smoothed: Vec::new(),
                threshold: row.threshold,
                episodes_to_threshold: Vec::new(),
            });
        }
        let s = summaries.last_mut().expect("pushed above");
        if row.episode != s.len() + 1 {
            return Err(Error::parse(&curves_path, format!("episode {} out of order", row.episode)));
        }
        s.count.push(row.count);
        s.mean.push(row.mean);
        s.std.push(row.std);
        s.smoothed.push(row.smoothed);
    }

    let thresholds_path = dir.join(THRESHOLDS_FILE);
    let mut reader =
        csv::Reader::from_path(&thresholds_path).map_err(|e| csv_error(&thresholds_path, e))?;
    for row in reader.deserialize() {
        let row: ThresholdRow = row.map_err(|e| csv_error(&thresholds_path, e))?;
        let s = summaries
            .iter_mut()
            .find(|s| s.environment == row.environment && s.algorithm == row.algorithm)
            .ok_or_else(|| {
                Error::parse(
                    &thresholds_path,
                    format!("no curve for {} on {}", row.algorithm, row.environment),
                )
            })?;
        s.episodes_to_threshold.push((row.seed, row.episodes));
    }
    Ok(summaries)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, format!("{other:?}")),
    }
}

/// Round "nice" tick spacing covering `span` with about `target` ticks.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let magnitude = 10f64.powf(raw.log10().floor());
    let residual = raw / magnitude;
    let nice = if residual < 1.5 {
        1.0
    } else if residual < 3.5 {
        2.0
    } else if residual < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * magnitude
}

fn render_svg(env: &str, group: &[&CurveSummary]) -> String {
    let episodes = group.iter().map(|s| s.len()).max().unwrap_or(1).max(1) as f64;
    let values = group.iter().flat_map(|s| s.smoothed.iter().copied());
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        (lo, hi) = (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_max = episodes.max(2.0);
    let px = |episode: f64| MARGIN_LEFT + (episode - 1.0) / (x_max - 1.0) * plot_w;
    let py = |v: f64| MARGIN_TOP + (hi - v) / (hi - lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{env}</text>"#,
        MARGIN_LEFT + plot_w / 2.0
    );

    let x_step = tick_step(x_max - 1.0, 8.0).max(1.0);
    let mut tick = x_step;
    let _ = writeln!(svg, r##"<g stroke="#dddddd">"##);
    let mut x_ticks = vec![1.0];
    while tick <= x_max {
        x_ticks.push(tick);
        tick += x_step;
    }
    let y_step = tick_step(hi - lo, 6.0);
    let mut y_ticks = Vec::new();
    let mut tick = (lo / y_step).ceil() * y_step;
    while tick <= hi {
        y_ticks.push(tick);
        tick += y_step;
    }
    for &t in &x_ticks {
        let x = px(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{MARGIN_TOP}" x2="{x:.2}" y2="{:.2}"/>"#,
            MARGIN_TOP + plot_h
        );
    }
    for &t in &y_ticks {
        let y = py(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"#,
            MARGIN_LEFT + plot_w
        );
    }
    let _ = writeln!(svg, "</g>");
    for &t in &x_ticks {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            px(t),
            MARGIN_TOP + plot_h + 18.0
        );
    }
    for &t in &y_ticks {
        let label = if y_step >= 1.0 { format!("{t:.0}") } else { format!("{t:.3}") };
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            MARGIN_LEFT - 6.0,
            py(t) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Episodes</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">Cumulative reward</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    for (i, s) in group.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = s
            .smoothed
            .iter()
            .enumerate()
            .map(|(e, v)| format!("{:.2},{:.2}", px(e as f64 + 1.0), py(*v)))
            .collect();
        let data: Vec<String> = s
            .smoothed
            .iter()
            .enumerate()
            .map(|(e, v)| format!("{} {v}", e + 1))
            .collect();
        let _ = writeln!(svg, r#"<g class="series" data-algorithm="{}">"#, s.algorithm);
        // Exact (episode, smoothed return) pairs, for readers of the file.
        let _ = writeln!(svg, "<desc>{}</desc>", data.join(", "));
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        if let [only] = s.smoothed.as_slice() {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{colour}"/>"#,
                px(1.0),
                py(*only)
            );
        }
        let ly = MARGIN_TOP + 16.0 + 20.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="3"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            s.algorithm.as_str().to_uppercase()
        );
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nice_ticks() {
        assert_eq!(tick_step(1000.0, 8.0), 100.0);
        assert_eq!(tick_step(400.0, 6.0), 50.0);
        assert_eq!(tick_step(2.0, 8.0), 0.2);
    }

    #[test]
    fn empty_input_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_charts(&[], dir.path()).is_err());
    }
}
