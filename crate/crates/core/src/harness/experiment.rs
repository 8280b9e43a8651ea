use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::chart::emit_charts;
use super::config::ExperimentConfig;
use super::records::{read_streams, RecordWriter, Stream};
use super::summary::{episodes_to_threshold, summarize, CurveSummary, SOLVE_WINDOW};
use crate::agents::{Algorithm, Trainer};
use crate::envs;
use crate::error::{Error, Result};
use crate::rng::split_seed;

pub const RESOLVED_CONFIG_FILE: &str = "config.toml";

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub output_dir: PathBuf,
    /// Ordered by algorithm (config order), then seed (config order).
    pub streams: Vec<Stream>,
    /// One per algorithm, in config order.
    pub summaries: Vec<CurveSummary>,
}

impl ExperimentOutcome {
    pub fn summary(&self, algorithm: Algorithm) -> Option<&CurveSummary> {
        self.summaries.iter().find(|s| s.algorithm == algorithm)
    }
}

/// Seed that drives every random draw of one (algorithm, seed) stream.
pub fn stream_seed(config: &ExperimentConfig, algorithm: Algorithm, seed: u64) -> u64 {
    split_seed(config.base_seed, algorithm.id(), seed)
}

/// Trains one stream and streams its records into `dir`.
pub fn run_stream(
    config: &ExperimentConfig,
    algorithm: Algorithm,
    seed: u64,
    dir: &Path,
) -> Result<Stream> {
    let mut env = envs::make(&config.env)?;
    let agent_config = config.agent_config(algorithm)?;
    let threshold = env.spec().solve_threshold.filter(|_| config.stop_on_solve);
    let mut trainer = Trainer::new(
        agent_config,
        env.spec(),
        seed,
        stream_seed(config, algorithm, seed),
    )?;
    let mut writer = RecordWriter::create(dir, algorithm, seed)?;
    let mut records = Vec::with_capacity(config.episodes);
    let mut returns = Vec::with_capacity(config.episodes);
    for _ in 0..config.episodes {
        let record = trainer.run_episode(env.as_mut())?;
        writer.write(&record)?;
        returns.push(record.raw_return);
        records.push(record);
        if let Some(t) = threshold {
            let tail = &returns[returns.len().saturating_sub(SOLVE_WINDOW)..];
            if tail.len() == SOLVE_WINDOW && episodes_to_threshold(tail, t).is_some() {
                break;
            }
        }
    }
    Ok(Stream {
        algorithm,
        seed,
        records,
    })
}

/// Builds one summary per algorithm from `streams`.
pub fn summarize_streams(config: &ExperimentConfig, streams: &[Stream]) -> Result<Vec<CurveSummary>> {
    let threshold = envs::make(&config.env)?.spec().solve_threshold;
    config
        .algorithms
        .iter()
        .filter_map(|&alg| {
            let group: Vec<&Stream> = streams.iter().filter(|s| s.algorithm == alg).collect();
            (!group.is_empty()).then(|| {
                summarize(
                    &config.env,
                    alg,
                    &group,
                    threshold,
                    config.smoothing.window,
                    config.smoothing.order,
                )
            })
        })
        .collect()
}

/// Runs every (algorithm, seed) stream in parallel, then writes summaries
/// and charts. The output directory receives:
///
/// - `config.toml`: the resolved configuration
/// - `records/<alg>-seed<seed>.csv`: one line per episode, flushed as produced
/// - `timing/<alg>-seed<seed>.csv`: wall-clock seconds per episode
/// - `<env>.svg`, `curves.csv`, `thresholds.csv`
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let dir = config.output_dir();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let resolved = dir.join(RESOLVED_CONFIG_FILE);
    fs::write(&resolved, config.to_toml_string()?).map_err(|e| Error::io(&resolved, e))?;

    let jobs: Vec<(Algorithm, u64)> = config
        .algorithms
        .iter()
        .flat_map(|&alg| config.seeds.iter().map(move |&seed| (alg, seed)))
        .collect();
    let streams: Vec<Stream> = jobs
        .par_iter()
        .map(|&(alg, seed)| run_stream(config, alg, seed, &dir))
        .collect::<Result<_>>()?;

    let summaries = summarize_streams(config, &streams)?;
    emit_charts(&summaries, &dir)?;
    Ok(ExperimentOutcome {
        output_dir: dir,
        streams,
        summaries,
    })
}

/// Re-reads the records of a previous (possibly interrupted) run in `dir`
/// and regenerates its summaries and charts. `smoothing` overrides the
/// window and order stored with the run.
pub fn replot(dir: &Path, smoothing: Option<(usize, usize)>) -> Result<Vec<CurveSummary>> {
    let mut config = ExperimentConfig::load(dir.join(RESOLVED_CONFIG_FILE), &[])?;
    if let Some((window, order)) = smoothing {
        config.smoothing.window = window;
        config.smoothing.order = order;
        config.validate()?;
    }
    let streams = read_streams(dir)?;
    if streams.is_empty() {
        return Err(Error::InsufficientData {
            requested: 1,
            available: 0,
        });
    }
    let summaries = summarize_streams(&config, &streams)?;
    emit_charts(&summaries, dir)?;
    Ok(summaries)
}
