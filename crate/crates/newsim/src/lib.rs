//! Measure day-by-day similarity of top news stories across archived
//! news-site homepages.
//!
//! The pipeline selects the archived snapshot (memento) of each homepage
//! nearest a target time of day, extracts the top-k ranked stories with
//! per-site CSS-selector rules, fetches and de-boilerplates each story,
//! and scores the day's collection with a TF-IDF/cosine similarity
//! aggregate in `[0, 1]`.
//!
//! Modules follow the pipeline stages:
//!
//! - [`memento`] — TimeMap retrieval/parsing, nearest-memento selection,
//!   fetching with a strict error policy, disk cache, archival statistics.
//! - [`extract`] — per-site, date-scoped selector rule sets and story
//!   extraction from homepage HTML.
//! - [`text`] — boilerplate removal, tokenization, TF-IDF vectors.
//! - [`similarity`] — pairwise cosine matrix and the collection score.
//! - [`pipeline`] — per-day orchestration, CSV/JSON outputs, archival
//!   reports, and an independent brute-force score oracle.

pub mod archive;
pub mod extract;
pub mod memento;
pub mod pipeline;
pub mod similarity;
pub mod text;

pub use archive::ArchiveConfig;
pub use extract::{RuleSet, SiteConfig, Story};
pub use memento::{MementoRecord, TimeMap};
pub use pipeline::{DailyResult, RunConfig};
pub use similarity::{CollectionScore, SimilarityMatrix};
pub use text::{CleanDocument, Corpus, TermVector};
