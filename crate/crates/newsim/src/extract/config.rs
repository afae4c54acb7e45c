//! Site configuration: versioned config file, per-site selector rule
//! sets with optional validity windows, and date-based rule resolution.
//!
//! Config file schema (version 1), one JSON document per run:
//!
//! ```json
//! {
//!   "version": 1,
//!   "archive": { "base_uri": "https://archive.example" },
//!   "sites": [
//!     {
//!       "site_id": "alpha",
//!       "homepage_uri": "http://alpha.example/",
//!       "rule_sets": [
//!         {
//!           "priority": 10,
//!           "valid_from": "2016-11-07",
//!           "valid_to": "2016-11-11",
//!           "hero_selectors": ["div.banner a.main"],
//!           "headline_selectors": ["ul.list a"]
//!         },
//!         {
//!           "priority": 0,
//!           "hero_selectors": ["a.hero-link"],
//!           "headline_selectors": ["h3.headline a"],
//!           "link_attribute": "href",
//!           "title_source": "text"
//!         }
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! Every site needs at least one rule set without a validity window
//! (the defaults). `title_source` is `"text"` (concatenated element
//! text) or `{"attribute": "<name>"}`. `max_stories`, when present,
//! caps a site's stories below the run's top-k.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::archive::ArchiveConfig;

use super::ExtractError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported config version {0}, expected {CONFIG_VERSION}")]
    Version(u32),
    #[error("duplicate site_id {0:?}")]
    DuplicateSiteId(String),
    #[error("site {0:?} has no rule set without a validity window")]
    NoDefaultRules(String),
    #[error("site {0:?} rule set {1} has neither hero nor headline selectors")]
    NoSelectors(String, usize),
    #[error("site {0:?} rule set {1}: valid_from is after valid_to")]
    InvertedWindow(String, usize),
    #[error("site {0:?} rule set {1}: selector {2:?} does not parse")]
    BadSelector(String, usize, String),
    #[error("site {0:?}: homepage_uri is not an absolute http(s) URI")]
    BadHomepage(String),
}

/// Where a story's title text comes from.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TitleSource {
    /// Concatenated descendant text of the matched element.
    #[default]
    Text,
    /// A named attribute on the matched element.
    Attribute(String),
}

fn default_link_attribute() -> String {
    "href".to_string()
}

/// One set of extraction selectors, optionally scoped to a date range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    /// Inclusive window start; open when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valid_from: Option<NaiveDate>,
    /// Inclusive window end; open when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valid_to: Option<NaiveDate>,
    /// Higher priority wins when several rule sets cover a date.
    #[serde(default)]
    pub priority: i32,
    #[serde(default)]
    pub hero_selectors: Vec<String>,
    #[serde(default)]
    pub headline_selectors: Vec<String>,
    /// Attribute holding the story URI.
    #[serde(default = "default_link_attribute")]
    pub link_attribute: String,
    #[serde(default)]
    pub title_source: TitleSource,
}

impl RuleSet {
    pub fn covers(&self, date: NaiveDate) -> bool {
        self.valid_from.map(|from| date >= from).unwrap_or(true)
            && self.valid_to.map(|to| date <= to).unwrap_or(true)
    }

    fn is_unbounded(&self) -> bool {
        self.valid_from.is_none() && self.valid_to.is_none()
    }
}

/// Per-site extraction configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteConfig {
    pub site_id: String,
    pub homepage_uri: String,
    pub rule_sets: Vec<RuleSet>,
    /// Optional per-site story cap below the run's top-k.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_stories: Option<usize>,
}

/// Whole-run configuration document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigFile {
    pub version: u32,
    pub archive: ArchiveConfig,
    pub sites: Vec<SiteConfig>,
}

/// Load and validate a config file.
pub fn load_config_file(path: impl AsRef<Path>) -> Result<ConfigFile, ConfigError> {
    let data = fs::read(path.as_ref())?;
    let config: ConfigFile = serde_json::from_slice(&data)?;
    validate(&config)?;
    Ok(config)
}

pub fn validate(config: &ConfigFile) -> Result<(), ConfigError> {
    if config.version != CONFIG_VERSION {
        return Err(ConfigError::Version(config.version));
    }
    let mut seen = BTreeSet::new();
    for site in &config.sites {
        if !seen.insert(site.site_id.as_str()) {
            return Err(ConfigError::DuplicateSiteId(site.site_id.clone()));
        }
        match url::Url::parse(&site.homepage_uri) {
            Ok(u) if matches!(u.scheme(), "http" | "https") => {}
            _ => return Err(ConfigError::BadHomepage(site.site_id.clone())),
        }
        if !site.rule_sets.iter().any(RuleSet::is_unbounded) {
            return Err(ConfigError::NoDefaultRules(site.site_id.clone()));
        }
        for (i, rules) in site.rule_sets.iter().enumerate() {
            if rules.hero_selectors.is_empty() && rules.headline_selectors.is_empty() {
                return Err(ConfigError::NoSelectors(site.site_id.clone(), i));
            }
            if let (Some(from), Some(to)) = (rules.valid_from, rules.valid_to) {
                if from > to {
                    return Err(ConfigError::InvertedWindow(site.site_id.clone(), i));
                }
            }
            for sel in rules.hero_selectors.iter().chain(&rules.headline_selectors) {
                if scraper::Selector::parse(sel).is_err() {
                    return Err(ConfigError::BadSelector(site.site_id.clone(), i, sel.clone()));
                }
            }
        }
    }
    Ok(())
}

/// Pick the rule set governing `capture_date`: highest priority among
/// those whose window contains the date; the unbounded defaults match
/// any date. Ties go to the earlier entry in config order.
pub fn resolve_rules(config: &SiteConfig, capture_date: NaiveDate) -> Result<&RuleSet, ExtractError> {
    let mut best: Option<&RuleSet> = None;
    for rules in config.rule_sets.iter().filter(|r| r.covers(capture_date)) {
        // Strict improvement only, so ties keep the earlier entry.
        if best.map(|b| rules.priority > b.priority).unwrap_or(true) {
            best = Some(rules);
        }
    }
    best.ok_or_else(|| ExtractError::NoApplicableRules {
        site_id: config.site_id.clone(),
        date: capture_date,
    })
}
