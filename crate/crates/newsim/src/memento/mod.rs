//! Memento client: TimeMap parsing and serialization, nearest-memento
//! selection, fetching with a strict error policy, disk cache, and
//! archival-density statistics.

pub mod cache;
pub mod fetch;
mod select;
mod stats;
mod timemap;

pub use cache::CacheStore;
pub use fetch::{
    FetchError, FetchPolicy, FetchResult, Fetcher, HttpResponse, HttpTransport, StoreTransport,
    Transport, TransportError,
};
pub use select::select_nearest;
pub use stats::{
    archival_histogram, five_number_summary, offset_minutes, offset_stats, ArchivalStats,
    FiveNumberSummary, HourHistogram, OffsetSummary, StatsError,
};
pub use timemap::{parse_timemap, serialize_timemap};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TimeMapError {
    /// The body does not follow the link-format grammar.
    #[error("malformed TimeMap: {0}")]
    Malformed(String),
    /// Grammar was fine but no memento entries exist: the site has no
    /// captures.
    #[error("TimeMap has no memento entries")]
    Empty,
}

/// One archived snapshot of an original resource.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MementoRecord {
    /// URI of the archived copy.
    pub uri_m: String,
    /// URI of the live resource the copy was taken from.
    pub original_uri: String,
    /// Capture instant, second precision.
    pub capture_datetime: DateTime<Utc>,
}

/// All known captures of one original URI, ascending by capture time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeMap {
    pub original_uri: String,
    pub mementos: Vec<MementoRecord>,
}

impl TimeMap {
    pub fn len(&self) -> usize {
        self.mementos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mementos.is_empty()
    }
}
