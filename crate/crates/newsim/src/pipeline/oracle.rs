//! Brute-force score recomputation, kept deliberately independent of
//! the production path.
//!
//! The oracle re-reads the cleaned story texts persisted beside the
//! cache, re-derives each (day, k) corpus from the manifest, and
//! recomputes tokenize -> tf-idf -> cosine -> masked Frobenius with its
//! own hash-map arithmetic. Agreement within 1e-9 ties the pipeline's
//! linear-algebra plumbing back to the defining formulas.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use chrono::NaiveDate;

use super::day::{clean_text_path, SiteStatus};
use super::output::{RunManifest, MANIFEST_FILE};
use super::PipelineError;

pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct OracleComparison {
    pub date: NaiveDate,
    pub k: usize,
    pub pipeline: Option<f64>,
    pub oracle: Option<f64>,
}

impl OracleComparison {
    pub fn matches(&self) -> bool {
        match (self.pipeline, self.oracle) {
            (Some(a), Some(b)) => (a - b).abs() <= TOLERANCE,
            (None, None) => true,
            _ => false,
        }
    }
}

/// Recompute every (day, k) score recorded in `out_dir`'s manifest from
/// the cleaned texts under `cache_dir` and compare.
pub fn verify_scores(out_dir: &Path, cache_dir: &Path) -> Result<Vec<OracleComparison>, PipelineError> {
    let manifest_path = out_dir.join(MANIFEST_FILE);
    let manifest = RunManifest::load(&manifest_path)?
        .ok_or_else(|| PipelineError::Oracle(format!("no manifest at {}", manifest_path.display())))?;

    let mut comparisons = Vec::new();
    for (date, day) in &manifest.days {
        for kr in &day.per_k {
            let excluded: HashSet<&str> = kr.excluded.iter().map(|e| e.uri.as_str()).collect();
            let mut texts: Vec<String> = Vec::new();
            for site in &day.sites {
                if site.status != SiteStatus::Ok {
                    continue;
                }
                for story in site.stories.iter().filter(|s| s.rank <= kr.k) {
                    if excluded.contains(story.uri.as_str()) {
                        continue;
                    }
                    let path = clean_text_path(cache_dir, *date, &site.site_id, story.rank);
                    let text = fs::read_to_string(&path).map_err(|e| {
                        PipelineError::Oracle(format!("missing clean text {}: {e}", path.display()))
                    })?;
                    texts.push(text);
                }
            }
            if texts.len() != kr.n_documents {
                return Err(PipelineError::Oracle(format!(
                    "{date} k={}: manifest says {} documents, oracle found {}",
                    kr.k,
                    kr.n_documents,
                    texts.len()
                )));
            }
            let oracle = brute_force_score(&texts);
            comparisons.push(OracleComparison {
                date: *date,
                k: kr.k,
                pipeline: kr.score,
                oracle,
            });
        }
    }
    Ok(comparisons)
}

/// Self-contained scoring chain over raw document texts. `None` below
/// two documents, mirroring the pipeline's minimum-corpus rule.
pub fn brute_force_score(texts: &[String]) -> Option<f64> {
    let n = texts.len();
    if n < 2 {
        return None;
    }
    let token_lists: Vec<Vec<String>> = texts.iter().map(|t| split_terms(t)).collect();

    let mut df: HashMap<&str, usize> = HashMap::new();
    let tf_maps: Vec<HashMap<&str, usize>> = token_lists
        .iter()
        .map(|tokens| {
            let mut tf: HashMap<&str, usize> = HashMap::new();
            for t in tokens {
                *tf.entry(t.as_str()).or_insert(0) += 1;
            }
            for term in tf.keys() {
                *df.entry(term).or_insert(0) += 1;
            }
            tf
        })
        .collect();

    let weights: Vec<HashMap<&str, f64>> = tf_maps
        .iter()
        .map(|tf| {
            tf.iter()
                .map(|(&term, &count)| {
                    let idf = (n as f64 / df[term] as f64).ln();
                    (term, count as f64 * idf)
                })
                .collect()
        })
        .collect();

    let mut sum_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let c = cosine_maps(&weights[i], &weights[j]);
                sum_sq += c * c;
            }
        }
    }
    Some(sum_sq.sqrt() / ((n * (n - 1)) as f64).sqrt())
}

fn split_terms(text: &str) -> Vec<String> {
    let mut terms = Vec::new();
    let mut current = String::new();
    for c in text.to_lowercase().chars() {
        if c.is_alphanumeric() {
            current.push(c);
        } else if !current.is_empty() {
            terms.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        terms.push(current);
    }
    terms.retain(|t| t.chars().count() >= 2);
    terms
}

fn cosine_maps(a: &HashMap<&str, f64>, b: &HashMap<&str, f64>) -> f64 {
    let norm = |m: &HashMap<&str, f64>| m.values().map(|w| w * w).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let dot: f64 = a
        .iter()
        .filter_map(|(term, w)| b.get(term).map(|v| w * v))
        .sum();
    dot / (na * nb)
}
