//! Story extraction: per-site, date-scoped CSS-selector rule sets
//! applied to homepage mementos.

mod config;
mod stories;

pub use config::{
    load_config_file, resolve_rules, ConfigError, ConfigFile, RuleSet, SiteConfig, TitleSource,
    CONFIG_VERSION,
};
pub use stories::{dedup_key, extract_stories, normalize_story_uri, Story};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtractError {
    /// No rule set covers the capture date; the site config violates
    /// the always-have-defaults invariant.
    #[error("no rule set applies to {site_id} on {date}")]
    NoApplicableRules { site_id: String, date: chrono::NaiveDate },
    /// Selectors matched nothing: selector/markup mismatch for that
    /// site-day.
    #[error("no stories extracted for {site_id}")]
    NoStoriesExtracted { site_id: String },
    /// A URI sits in the archive replay namespace but its tail is not
    /// an absolute URI.
    #[error(transparent)]
    MalformedArchiveUri(#[from] crate::archive::ArchiveError),
}
