//! Time-series outputs: per-(date,k) scores CSV, per-k summary CSV,
//! and the JSON run manifest with full per-site detail.
//!
//! Offline runs over the same inputs produce byte-identical files:
//! map keys are ordered, struct fields serialize in declaration order,
//! and no wall-clock values enter the outputs.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::day::DailyResult;
use super::PipelineError;

pub const SCORES_FILE: &str = "scores.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub const MANIFEST_VERSION: u32 = 1;

/// Accumulated per-day results, keyed by date; doubles as the resume
/// checkpoint and the JSON output.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunManifest {
    #[serde(default = "manifest_version")]
    pub version: u32,
    pub days: BTreeMap<NaiveDate, DailyResult>,
}

fn manifest_version() -> u32 {
    MANIFEST_VERSION
}

impl RunManifest {
    pub fn new() -> Self {
        Self { version: MANIFEST_VERSION, days: BTreeMap::new() }
    }

    pub fn load(path: &Path) -> Result<Option<Self>, PipelineError> {
        if !path.exists() {
            return Ok(None);
        }
        let data = fs::read(path).map_err(|e| unwritable(path, e))?;
        let manifest: Self = serde_json::from_slice(&data)
            .map_err(|e| PipelineError::Manifest(format!("{}: {e}", path.display())))?;
        if manifest.version != MANIFEST_VERSION {
            return Err(PipelineError::Manifest(format!(
                "unsupported manifest version {}",
                manifest.version
            )));
        }
        Ok(Some(manifest))
    }

    pub fn save(&self, path: &Path) -> Result<(), PipelineError> {
        let mut data = serde_json::to_vec_pretty(self)
            .map_err(|e| PipelineError::Manifest(e.to_string()))?;
        data.push(b'\n');
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, &data).map_err(|e| unwritable(path, e))?;
        fs::rename(&tmp, path).map_err(|e| unwritable(path, e))
    }
}

fn unwritable(path: &Path, source: io::Error) -> PipelineError {
    PipelineError::OutputUnwritable { path: path.to_path_buf(), message: source.to_string() }
}

/// Write `scores.csv`, `summary.csv`, and `manifest.json` under
/// `out_dir` for the given results.
///
/// Scores are fixed to six decimal places; a skipped k (fewer than two
/// documents) leaves the score field empty. Summary rows give min,
/// mean, and max of the emitted scores per k.
pub fn emit_series(results: &[DailyResult], out_dir: &Path) -> Result<EmittedPaths, PipelineError> {
    if results.is_empty() {
        return Err(PipelineError::NoResults);
    }
    fs::create_dir_all(out_dir).map_err(|e| unwritable(out_dir, e))?;

    let scores_path = out_dir.join(SCORES_FILE);
    write_scores_csv(results, &scores_path)?;

    let summary_path = out_dir.join(SUMMARY_FILE);
    write_summary_csv(results, &summary_path)?;

    let manifest_path = out_dir.join(MANIFEST_FILE);
    let mut manifest = RunManifest::new();
    for r in results {
        manifest.days.insert(r.date, r.clone());
    }
    manifest.save(&manifest_path)?;

    Ok(EmittedPaths { scores: scores_path, summary: summary_path, manifest: manifest_path })
}

#[derive(Debug, Clone)]
pub struct EmittedPaths {
    pub scores: PathBuf,
    pub summary: PathBuf,
    pub manifest: PathBuf,
}

fn write_scores_csv(results: &[DailyResult], path: &Path) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["date", "k", "score", "n_documents", "n_excluded"])
        .map_err(|e| csv_err(path, e))?;
    for day in results {
        for kr in &day.per_k {
            let score = kr.score.map(|s| format!("{s:.6}")).unwrap_or_default();
            w.write_record([
                day.date.to_string(),
                kr.k.to_string(),
                score,
                kr.n_documents.to_string(),
                kr.excluded.len().to_string(),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| unwritable(path, e))
}

fn write_summary_csv(results: &[DailyResult], path: &Path) -> Result<(), PipelineError> {
    let mut per_k: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for day in results {
        for kr in &day.per_k {
            if let Some(s) = kr.score {
                per_k.entry(kr.k).or_default().push(s);
            }
        }
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["k", "n_days", "min", "mean", "max"])
        .map_err(|e| csv_err(path, e))?;
    for (k, scores) in &per_k {
        let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        w.write_record([
            k.to_string(),
            scores.len().to_string(),
            format!("{min:.6}"),
            format!("{mean:.6}"),
            format!("{max:.6}"),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| unwritable(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> PipelineError {
    PipelineError::OutputUnwritable { path: path.to_path_buf(), message: e.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::day::KResult;

    fn day(date: &str, scores: &[(usize, Option<f64>)]) -> DailyResult {
        DailyResult {
            date: date.parse().unwrap(),
            failed: scores.iter().all(|(_, s)| s.is_none()),
            sites: vec![],
            per_k: scores
                .iter()
                .map(|&(k, score)| KResult {
                    k,
                    score,
                    n_documents: if score.is_some() { 2 } else { 1 },
                    excluded: vec![],
                    skip_reason: score.is_none().then(|| "1 document(s), need at least 2".into()),
                })
                .collect(),
        }
    }

    #[test]
    fn one_row_per_date_k() {
        let dir = tempfile::tempdir().unwrap();
        let results = vec![day("2016-11-01", &[(1, Some(0.5)), (3, Some(0.25))])];
        let paths = emit_series(&results, dir.path()).unwrap();
        let csv = fs::read_to_string(&paths.scores).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "date,k,score,n_documents,n_excluded");
        assert_eq!(lines[1], "2016-11-01,1,0.500000,2,0");
        assert_eq!(lines[2], "2016-11-01,3,0.250000,2,0");
    }

    #[test]
    fn skipped_k_leaves_score_empty() {
        let dir = tempfile::tempdir().unwrap();
        let results = vec![day("2016-11-01", &[(1, None)])];
        let paths = emit_series(&results, dir.path()).unwrap();
        let csv = fs::read_to_string(&paths.scores).unwrap();
        assert!(csv.lines().nth(1).unwrap().starts_with("2016-11-01,1,,1,"));
    }

    #[test]
    fn summary_matches_hand_computation() {
        let dir = tempfile::tempdir().unwrap();
        let results = vec![
            day("2016-11-01", &[(1, Some(0.2)), (3, Some(0.1))]),
            day("2016-11-02", &[(1, Some(0.6)), (3, Some(0.3))]),
            day("2016-11-03", &[(1, Some(0.4)), (3, None)]),
        ];
        let paths = emit_series(&results, dir.path()).unwrap();
        let csv = fs::read_to_string(&paths.summary).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,n_days,min,mean,max");
        assert_eq!(lines[1], "1,3,0.200000,0.400000,0.600000");
        assert_eq!(lines[2], "3,2,0.100000,0.200000,0.300000");
    }

    #[test]
    fn empty_results_error_and_no_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("sub");
        assert!(matches!(emit_series(&[], &out), Err(PipelineError::NoResults)));
        assert!(!out.exists());
    }

    #[test]
    fn emit_twice_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let results = vec![day("2016-11-01", &[(1, Some(0.123456789))])];
        let p1 = emit_series(&results, dir.path()).unwrap();
        let scores1 = fs::read(&p1.scores).unwrap();
        let manifest1 = fs::read(&p1.manifest).unwrap();
        let p2 = emit_series(&results, dir.path()).unwrap();
        assert_eq!(scores1, fs::read(&p2.scores).unwrap());
        assert_eq!(manifest1, fs::read(&p2.manifest).unwrap());
    }
}
