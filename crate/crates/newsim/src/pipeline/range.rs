//! Date-range orchestration with per-day checkpointing.
//!
//! Days already present in the output manifest are skipped unless the
//! run is forced, so an interrupted range picks up where it left off
//! and a completed one replays entirely from the manifest and cache.

use super::day::{collect_sites, extract_day, run_day, DailyResult};
use super::output::{emit_series, RunManifest, MANIFEST_FILE};
use super::{PipelineError, RunConfig};
use crate::memento::Fetcher;

#[derive(Debug, Clone)]
pub struct RangeOutcome {
    /// One result per date in the range, chronological.
    pub results: Vec<DailyResult>,
    pub days_run: usize,
    pub days_skipped: usize,
}

impl RangeOutcome {
    pub fn any_failed(&self) -> bool {
        self.results.iter().any(|r| r.failed)
    }
}

/// Score every day in the range and emit the series outputs.
pub fn run_range(cfg: &RunConfig, fetcher: &Fetcher) -> Result<RangeOutcome, PipelineError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| PipelineError::OutputUnwritable {
        path: cfg.out_dir.clone(),
        message: e.to_string(),
    })?;
    let manifest_path = cfg.out_dir.join(MANIFEST_FILE);
    let mut manifest = RunManifest::load(&manifest_path)?.unwrap_or_default();
    if manifest.days.is_empty() {
        manifest = RunManifest::new();
    }

    let mut days_run = 0;
    let mut days_skipped = 0;
    for date in cfg.dates() {
        if !cfg.force && manifest.days.contains_key(&date) {
            days_skipped += 1;
            continue;
        }
        let result = run_day(cfg, fetcher, date);
        manifest.days.insert(date, result);
        // Checkpoint after every day so interrupted runs resume.
        manifest.save(&manifest_path)?;
        days_run += 1;
    }

    let results: Vec<DailyResult> = cfg
        .dates()
        .map(|d| manifest.days.get(&d).cloned().expect("every range day computed"))
        .collect();

    emit_series(&results, &cfg.out_dir)?;
    // emit_series rewrites the manifest from the range alone; put the
    // full day set back so disjoint ranges accumulate.
    manifest.save(&manifest_path)?;

    Ok(RangeOutcome { results, days_run, days_skipped })
}

/// Stories-only variant: select mementos and extract stories without
/// fetching documents or scoring. Used by the `extract` subcommand.
pub fn run_range_extract(
    cfg: &RunConfig,
    fetcher: &Fetcher,
) -> Result<Vec<DailyResult>, PipelineError> {
    cfg.validate()?;
    Ok(cfg.dates().map(|date| extract_day(cfg, fetcher, date)).collect())
}

/// Populate the cache with everything a later offline scoring run
/// needs: TimeMaps, homepage mementos, and story documents.
pub fn run_range_fetch(cfg: &RunConfig, fetcher: &Fetcher) -> Result<usize, PipelineError> {
    cfg.validate()?;
    let mut fetched = 0;
    for date in cfg.dates() {
        let sites = collect_sites(cfg, fetcher, date);
        let story_uris: Vec<String> = sites
            .iter()
            .flat_map(|s| s.stories.iter().map(|st| st.uri.clone()))
            .collect();
        fetched += story_uris.len();
        let _ = fetcher.fetch_many(&story_uris);
    }
    Ok(fetched)
}
