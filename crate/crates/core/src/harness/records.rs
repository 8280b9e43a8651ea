//! Per-stream record files.
//!
//! Each (algorithm, seed) stream writes `records/<alg>-seed<seed>.csv` with
//! a header row and one line per finished episode, flushed immediately so a
//! killed run keeps every completed episode. Wall-clock durations go to a
//! sibling `timing/` file so the record files themselves are a pure
//! function of the configuration.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agents::{Algorithm, EpisodeRecord};
use crate::error::{Error, Result};

pub const RECORDS_DIR: &str = "records";
pub const TIMING_DIR: &str = "timing";

pub fn record_path(dir: &Path, algorithm: Algorithm, seed: u64) -> PathBuf {
    dir.join(RECORDS_DIR).join(format!("{algorithm}-seed{seed}.csv"))
}

fn timing_path(dir: &Path, algorithm: Algorithm, seed: u64) -> PathBuf {
    dir.join(TIMING_DIR).join(format!("{algorithm}-seed{seed}.csv"))
}

#[derive(Debug, Serialize, Deserialize)]
struct TimingRow {
    episode: usize,
    duration_secs: f64,
}

fn create(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, format!("{other:?}")),
    }
}

/// Appends records for one stream, flushing after every episode.
pub struct RecordWriter {
    records: csv::Writer<File>,
    timing: csv::Writer<File>,
    record_path: PathBuf,
    timing_path: PathBuf,
    last_episode: Option<usize>,
}

impl RecordWriter {
    pub fn create(dir: &Path, algorithm: Algorithm, seed: u64) -> Result<Self> {
        let record_path = record_path(dir, algorithm, seed);
        let timing_path = timing_path(dir, algorithm, seed);
        Ok(RecordWriter {
            records: create(&record_path)?,
            timing: create(&timing_path)?,
            record_path,
            timing_path,
            last_episode: None,
        })
    }

    pub fn path(&self) -> &Path {
        &self.record_path
    }

    pub fn write(&mut self, record: &EpisodeRecord) -> Result<()> {
        if self.last_episode.is_some_and(|last| record.episode <= last) {
            return Err(Error::contract(format!(
                "episode {} written after episode {}",
                record.episode,
                self.last_episode.unwrap_or_default()
            )));
        }
        self.records
            .serialize(record)
            .and_then(|()| self.records.flush().map_err(csv::Error::from))
            .map_err(|e| csv_error(&self.record_path, e))?;
        self.timing
            .serialize(TimingRow {
                episode: record.episode,
                duration_secs: record.duration_secs,
            })
            .and_then(|()| self.timing.flush().map_err(csv::Error::from))
            .map_err(|e| csv_error(&self.timing_path, e))?;
        self.last_episode = Some(record.episode);
        Ok(())
    }
}

/// Reads one record file. Durations are zero; they live in the timing file.
pub fn read_records(path: &Path) -> Result<Vec<EpisodeRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let records: Vec<EpisodeRecord> = reader
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| csv_error(path, e))?;
    if records.windows(2).any(|w| w[1].episode <= w[0].episode) {
        return Err(Error::parse(path, "episode indices are not strictly increasing"));
    }
    Ok(records)
}

/// One finished or partial (algorithm, seed) stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub records: Vec<EpisodeRecord>,
}

impl Stream {
    pub fn returns(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.raw_return).collect()
    }
}

/// Loads every stream under `<dir>/records`, ordered by algorithm then seed.
pub fn read_streams(dir: &Path) -> Result<Vec<Stream>> {
    let records_dir = dir.join(RECORDS_DIR);
    let entries = fs::read_dir(&records_dir).map_err(|e| Error::io(&records_dir, e))?;
    let mut streams = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(&records_dir, e))?.path();
        if path.extension().is_none_or(|ext| ext != "csv") {
            continue;
        }
        let records = read_records(&path)?;
        let Some(first) = records.first() else { continue };
        let (algorithm, seed) = (first.algorithm, first.seed);
        if records.iter().any(|r| r.algorithm != algorithm || r.seed != seed) {
            return Err(Error::parse(&path, "file mixes several streams"));
        }
        streams.push(Stream {
            algorithm,
            seed,
            records,
        });
    }
    streams.sort_by_key(|s| (s.algorithm, s.seed));
    Ok(streams)
}
