//! Pipeline orchestration: per-day runs over a date range, series
//! outputs, archival reports, and the brute-force score oracle.

mod config;
mod day;
mod oracle;
mod output;
mod range;
mod report;

pub use config::{
    default_k_values, default_target_time, parse_month, parse_target_time, RunConfig,
};
pub use day::{
    clean_text_path, collect_sites, extract_day, run_day, DailyResult, ExcludedUri,
    ExclusionReason, KResult, SiteDay, SiteStatus,
};
pub use oracle::{brute_force_score, verify_scores, OracleComparison, TOLERANCE};
pub use output::{
    emit_series, EmittedPaths, RunManifest, MANIFEST_FILE, SCORES_FILE, SUMMARY_FILE,
};
pub use range::{run_range, run_range_extract, run_range_fetch, RangeOutcome};
pub use report::{report_archival, ArchivalReport, HOURS_FILE, OFFSETS_FILE};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot write {path}: {message}")]
    OutputUnwritable { path: PathBuf, message: String },
    #[error("no results to emit")]
    NoResults,
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error("oracle error: {0}")]
    Oracle(String),
}

/// Build the fetcher a run needs: cache-backed, online over HTTP unless
/// the run is offline or a substitute transport (file store, mock) is
/// supplied.
pub fn build_fetcher(
    cfg: &RunConfig,
    transport_override: Option<Box<dyn crate::memento::Transport>>,
) -> Result<crate::memento::Fetcher, PipelineError> {
    let cache = crate::memento::CacheStore::open(&cfg.cache_dir).map_err(|e| {
        PipelineError::OutputUnwritable { path: cfg.cache_dir.clone(), message: e.to_string() }
    })?;
    let transport: Option<Box<dyn crate::memento::Transport>> = if cfg.offline {
        None
    } else {
        match transport_override {
            Some(t) => Some(t),
            None => Some(Box::new(crate::memento::HttpTransport::new(
                cfg.fetch_policy.timeout,
            ))),
        }
    };
    Ok(crate::memento::Fetcher::new(transport, Some(cache), cfg.fetch_policy.clone()))
}
