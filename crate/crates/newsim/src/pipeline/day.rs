//! One day of the pipeline: select each site's memento, extract its
//! top stories, fetch and clean the story documents, then score the
//! collection once per k.
//!
//! Failures stay local: a failed site or story degrades the corpus and
//! is recorded with a machine-readable reason; it never aborts the day.
//! A day fails only when fewer than two documents exist for every k.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::extract::{extract_stories, ExtractError, SiteConfig, Story};
use crate::memento::{
    offset_minutes, parse_timemap, select_nearest, FetchError, Fetcher, MementoRecord,
    TimeMapError,
};
use crate::similarity::{collection_score, grouped_collection_score, pairwise_matrix};
use crate::text::{build_tfidf, strip_boilerplate, CleanDocument, Corpus, StoryRef, TextError};

use super::RunConfig;

/// Why a URI contributed nothing to the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExclusionReason {
    /// Terminal 4xx/5xx on fetch.
    HttpError,
    /// Redirect chain exceeded the hop limit.
    RedirectLoop,
    /// Boilerplate removal left nothing.
    EmptyDocument,
    /// Selectors matched nothing on the homepage.
    NoStories,
    /// The site has no captures at all.
    EmptyTimemap,
    /// TimeMap body failed to parse.
    MalformedTimemap,
    /// Transport-level failure (timeout, offline miss, bad URI).
    FetchError,
    /// Selected capture was farther from the target than allowed.
    OffsetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedUri {
    pub uri: String,
    pub reason: ExclusionReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "kebab-case")]
pub enum SiteStatus {
    Ok,
    Failed {
        reason: ExclusionReason,
        uri: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        detail: Option<String>,
    },
}

/// One site's slice of a day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteDay {
    pub site_id: String,
    pub status: SiteStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memento: Option<MementoRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset_minutes: Option<f64>,
    pub stories: Vec<Story>,
}

/// Scoring outcome for one k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KResult {
    pub k: usize,
    /// Absent when fewer than two documents survived.
    pub score: Option<f64>,
    pub n_documents: usize,
    pub excluded: Vec<ExcludedUri>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyResult {
    pub date: NaiveDate,
    /// True when every k ended below two documents.
    pub failed: bool,
    pub sites: Vec<SiteDay>,
    pub per_k: Vec<KResult>,
}

impl DailyResult {
    pub fn k_result(&self, k: usize) -> Option<&KResult> {
        self.per_k.iter().find(|r| r.k == k)
    }
}

enum DocOutcome {
    Clean(String),
    Excluded(ExclusionReason, Option<String>),
}

/// TimeMap, selection, homepage, and extraction for every site; the
/// shared front half of scoring and extract-only runs.
pub fn collect_sites(cfg: &RunConfig, fetcher: &Fetcher, date: NaiveDate) -> Vec<SiteDay> {
    let k_max = *cfg.k_values.last().expect("validated: k_values non-empty");
    let target = date.and_time(cfg.target_time).and_utc();
    cfg.sites
        .iter()
        .map(|site| process_site(cfg, fetcher, site, target, k_max))
        .collect()
}

/// Stories only: no document fetches, no scoring.
pub fn extract_day(cfg: &RunConfig, fetcher: &Fetcher, date: NaiveDate) -> DailyResult {
    let sites = collect_sites(cfg, fetcher, date);
    let failed = sites.iter().all(|s| s.status != SiteStatus::Ok);
    DailyResult { date, failed, sites, per_k: Vec::new() }
}

/// Run the full pipeline for one date.
pub fn run_day(cfg: &RunConfig, fetcher: &Fetcher, date: NaiveDate) -> DailyResult {
    let sites = collect_sites(cfg, fetcher, date);

    // Fetch and clean every extracted story once, at the largest k;
    // smaller k values reuse the prefix.
    let story_uris: Vec<String> = sites
        .iter()
        .flat_map(|s| s.stories.iter().map(|st| st.uri.clone()))
        .collect();
    let fetched = fetcher.fetch_many(&story_uris);

    let mut outcomes: BTreeMap<(usize, usize), DocOutcome> = BTreeMap::new();
    let mut cursor = 0usize;
    for (site_idx, site) in sites.iter().enumerate() {
        for story in &site.stories {
            let outcome = match &fetched[cursor] {
                Ok(result) => match strip_boilerplate(&result.body) {
                    Ok(text) => DocOutcome::Clean(text),
                    Err(TextError::EmptyDocument) => {
                        DocOutcome::Excluded(ExclusionReason::EmptyDocument, None)
                    }
                    Err(e) => DocOutcome::Excluded(ExclusionReason::FetchError, Some(e.to_string())),
                },
                Err(e) => {
                    let (reason, detail) = classify_fetch_error(e);
                    DocOutcome::Excluded(reason, detail)
                }
            };
            outcomes.insert((site_idx, story.rank), outcome);
            cursor += 1;
        }
    }

    persist_clean_texts(cfg, date, &sites, &outcomes);

    let per_k: Vec<KResult> = cfg
        .k_values
        .iter()
        .map(|&k| score_k(cfg, date, k, &sites, &outcomes))
        .collect();

    let failed = per_k.iter().all(|r| r.score.is_none());
    DailyResult { date, failed, sites, per_k }
}

/// TimeMap, selection, homepage, and extraction for one site.
fn process_site(
    cfg: &RunConfig,
    fetcher: &Fetcher,
    site: &SiteConfig,
    target: DateTime<Utc>,
    k_max: usize,
) -> SiteDay {
    let failed = |reason, uri: String, detail: Option<String>| SiteDay {
        site_id: site.site_id.clone(),
        status: SiteStatus::Failed { reason, uri, detail },
        memento: None,
        offset_minutes: None,
        stories: Vec::new(),
    };

    let tm_uri = cfg.archive.timemap_uri(&site.homepage_uri);
    let tm_body = match fetcher.fetch(&tm_uri) {
        Ok(r) => r,
        Err(e) => {
            let (reason, detail) = classify_fetch_error(&e);
            return failed(reason, tm_uri, detail);
        }
    };
    let tm = match parse_timemap(&String::from_utf8_lossy(&tm_body.body), &site.homepage_uri) {
        Ok(tm) => tm,
        Err(TimeMapError::Empty) => {
            return failed(ExclusionReason::EmptyTimemap, tm_uri, None);
        }
        Err(TimeMapError::Malformed(m)) => {
            return failed(ExclusionReason::MalformedTimemap, tm_uri, Some(m));
        }
    };

    let selected = select_nearest(&tm, target)
        .expect("timemap parse guarantees at least one memento")
        .clone();
    let offset = offset_minutes(&selected, target);
    if let Some(max) = cfg.max_offset_minutes {
        if offset.abs() > max {
            return failed(
                ExclusionReason::OffsetExceeded,
                selected.uri_m.clone(),
                Some(format!("offset {offset:.1} min exceeds {max:.1}")),
            );
        }
    }

    let homepage = match fetcher.fetch(&selected.uri_m) {
        Ok(r) => r,
        Err(e) => {
            let (reason, detail) = classify_fetch_error(&e);
            return failed(reason, selected.uri_m.clone(), detail);
        }
    };

    let cap = site.max_stories.map_or(k_max, |cap| cap.min(k_max));
    let stories = match extract_stories(
        &homepage.body,
        site,
        &cfg.archive,
        selected.capture_datetime,
        &site.homepage_uri,
        cap,
    ) {
        Ok(stories) => stories,
        Err(ExtractError::NoStoriesExtracted { .. }) => {
            return failed(ExclusionReason::NoStories, selected.uri_m.clone(), None);
        }
        Err(e) => {
            // Config validation makes the remaining variants unreachable
            // in practice; record rather than abort if one slips through.
            return failed(
                ExclusionReason::NoStories,
                selected.uri_m.clone(),
                Some(e.to_string()),
            );
        }
    };

    SiteDay {
        site_id: site.site_id.clone(),
        status: SiteStatus::Ok,
        memento: Some(selected),
        offset_minutes: Some(offset),
        stories,
    }
}

fn classify_fetch_error(e: &FetchError) -> (ExclusionReason, Option<String>) {
    match e {
        FetchError::Http { status, .. } => (ExclusionReason::HttpError, Some(status.to_string())),
        FetchError::TooManyRedirects { .. } => (ExclusionReason::RedirectLoop, None),
        other => (ExclusionReason::FetchError, Some(other.to_string())),
    }
}

/// Cleaned story text lands beside the cache for inspection and for
/// the score oracle.
pub fn clean_text_path(cache_dir: &Path, date: NaiveDate, site_id: &str, rank: usize) -> PathBuf {
    cache_dir
        .join("clean")
        .join(date.to_string())
        .join(format!("{site_id}-r{rank}.txt"))
}

fn persist_clean_texts(
    cfg: &RunConfig,
    date: NaiveDate,
    sites: &[SiteDay],
    outcomes: &BTreeMap<(usize, usize), DocOutcome>,
) {
    for (site_idx, site) in sites.iter().enumerate() {
        for story in &site.stories {
            if let Some(DocOutcome::Clean(text)) = outcomes.get(&(site_idx, story.rank)) {
                let path = clean_text_path(&cfg.cache_dir, date, &site.site_id, story.rank);
                if let Some(parent) = path.parent() {
                    let _ = fs::create_dir_all(parent);
                }
                let _ = fs::write(path, text.as_bytes());
            }
        }
    }
}

/// Assemble the k-corpus and score it. Site-level failures enter the
/// exclusion list once per k; story-level failures enter for every k
/// that would have included them.
fn score_k(
    cfg: &RunConfig,
    date: NaiveDate,
    k: usize,
    sites: &[SiteDay],
    outcomes: &BTreeMap<(usize, usize), DocOutcome>,
) -> KResult {
    let mut documents: Vec<CleanDocument> = Vec::new();
    let mut groups: Vec<usize> = Vec::new();
    let mut excluded: Vec<ExcludedUri> = Vec::new();

    for (site_idx, site) in sites.iter().enumerate() {
        match &site.status {
            SiteStatus::Failed { reason, uri, detail } => {
                excluded.push(ExcludedUri {
                    uri: uri.clone(),
                    reason: *reason,
                    detail: detail.clone(),
                });
            }
            SiteStatus::Ok => {
                for story in site.stories.iter().filter(|s| s.rank <= k) {
                    match outcomes
                        .get(&(site_idx, story.rank))
                        .expect("every story has an outcome")
                    {
                        DocOutcome::Clean(text) => {
                            documents.push(CleanDocument::new(
                                StoryRef {
                                    site_id: site.site_id.clone(),
                                    rank: story.rank,
                                    capture_date: date,
                                },
                                text.clone(),
                            ));
                            groups.push(site_idx);
                        }
                        DocOutcome::Excluded(reason, detail) => {
                            excluded.push(ExcludedUri {
                                uri: story.uri.clone(),
                                reason: *reason,
                                detail: detail.clone(),
                            });
                        }
                    }
                }
            }
        }
    }

    let n_documents = documents.len();
    if n_documents < 2 {
        return KResult {
            k,
            score: None,
            n_documents,
            excluded,
            skip_reason: Some(format!("{n_documents} document(s), need at least 2")),
        };
    }

    let corpus = Corpus::build(documents);
    let vectors = build_tfidf(&corpus).expect("n >= 2 checked above");
    let matrix = pairwise_matrix(&vectors).expect("nonnegative weights keep cosines in range");
    let score = if cfg.mask_intra_site {
        grouped_collection_score(&matrix, &groups)
    } else {
        collection_score(&matrix)
    }
    .expect("matrix validated by pairwise_matrix");

    if cfg.dump_matrices {
        let dir = cfg.out_dir.join("matrices");
        let _ = fs::create_dir_all(&dir);
        let _ = fs::write(dir.join(format!("{date}-k{k}.txt")), matrix.to_debug_text());
    }

    KResult { k, score: Some(score.s), n_documents, excluded, skip_reason: None }
}
