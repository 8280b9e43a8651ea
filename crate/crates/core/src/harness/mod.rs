//! Experiment harness: multi-seed campaigns, record logging, learning-curve
//! smoothing and chart output.

mod chart;
mod config;
mod experiment;
mod records;
mod savgol;
mod summary;

pub use chart::{emit_charts, read_summaries, CURVES_FILE, THRESHOLDS_FILE};
pub use config::{
    apply_override, default_output_root, ExperimentConfig, Smoothing, DEFAULT_OUTPUT_ROOT,
    OUTPUT_ROOT_VAR,
};
pub use experiment::{
    replot, run_experiment, run_stream, stream_seed, summarize_streams, ExperimentOutcome,
    RESOLVED_CONFIG_FILE,
};
pub use records::{read_records, read_streams, record_path, RecordWriter, Stream};
pub use savgol::savgol_smooth;
pub use summary::{
    episodes_to_threshold, smooth_curve, summarize, trailing_mean, CurveSummary, SOLVE_WINDOW,
};
