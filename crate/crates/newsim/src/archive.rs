//! Web-archive namespace: TimeMap endpoint template and replay-URI
//! arithmetic.
//!
//! One archive endpoint per run. TimeMaps live at
//! `<base>/web/timemap/link/<original>` and replayed captures at
//! `<base>/web/<14-digit timestamp>/<original>`, the conventional
//! wayback layout. The timestamp may carry a replay modifier suffix
//! such as `id_`.

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("archive base URI is not valid: {0}")]
    InvalidBase(String),
    #[error("replay URI recognized but its tail is not an absolute URI: {0}")]
    MalformedArchiveUri(String),
}

/// The archive endpoint a run talks to.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ArchiveConfigRaw", into = "ArchiveConfigRaw")]
pub struct ArchiveConfig {
    base: String,
    host: String,
    port: Option<u16>,
    timemap_template: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ArchiveConfigRaw {
    base_uri: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    timemap_template: Option<String>,
}

impl TryFrom<ArchiveConfigRaw> for ArchiveConfig {
    type Error = ArchiveError;
    fn try_from(raw: ArchiveConfigRaw) -> Result<Self, Self::Error> {
        let mut cfg = ArchiveConfig::new(&raw.base_uri)?;
        if let Some(template) = raw.timemap_template {
            cfg = cfg.with_timemap_template(&template)?;
        }
        Ok(cfg)
    }
}

impl From<ArchiveConfig> for ArchiveConfigRaw {
    fn from(cfg: ArchiveConfig) -> Self {
        ArchiveConfigRaw { base_uri: cfg.base, timemap_template: cfg.timemap_template }
    }
}

impl ArchiveConfig {
    pub fn new(base_uri: &str) -> Result<Self, ArchiveError> {
        let base = base_uri.trim_end_matches('/').to_string();
        let url = Url::parse(&base).map_err(|e| ArchiveError::InvalidBase(e.to_string()))?;
        if !matches!(url.scheme(), "http" | "https") {
            return Err(ArchiveError::InvalidBase(format!(
                "unsupported scheme {}",
                url.scheme()
            )));
        }
        let host = url
            .host_str()
            .ok_or_else(|| ArchiveError::InvalidBase("missing host".into()))?
            .to_string();
        Ok(Self { base, host, port: url.port(), timemap_template: None })
    }

    /// Override the TimeMap endpoint; `{base}` and `{original}` expand
    /// to the archive base and the original URI.
    pub fn with_timemap_template(mut self, template: &str) -> Result<Self, ArchiveError> {
        if !template.contains("{original}") {
            return Err(ArchiveError::InvalidBase(format!(
                "timemap template {template:?} lacks an {{original}} placeholder"
            )));
        }
        self.timemap_template = Some(template.to_string());
        Ok(self)
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn host(&self) -> &str {
        &self.host
    }

    /// TimeMap endpoint for an original URI.
    pub fn timemap_uri(&self, original_uri: &str) -> String {
        match &self.timemap_template {
            Some(template) => template
                .replace("{base}", &self.base)
                .replace("{original}", original_uri),
            None => format!("{}/web/timemap/link/{}", self.base, original_uri),
        }
    }

    /// Replay URI for an original at a capture time.
    pub fn replay_uri(&self, capture: DateTime<Utc>, original_uri: &str) -> String {
        format!("{}/web/{}/{}", self.base, format_ts14(capture), original_uri)
    }

    /// Split a URI in this archive's replay namespace into capture time
    /// and original URI. `None` when the URI is not in the namespace.
    pub fn split_replay(&self, uri: &str) -> Option<Result<(DateTime<Utc>, String), ArchiveError>> {
        let parsed = Url::parse(uri).ok()?;
        if parsed.host_str() != Some(self.host.as_str()) || parsed.port() != self.port {
            return None;
        }
        // Work on the raw string: the embedded original keeps its "//".
        let path_start = uri.find("/web/")?;
        let rest = &uri[path_start + "/web/".len()..];
        let slash = rest.find('/')?;
        let (stamp, tail) = (&rest[..slash], &rest[slash + 1..]);
        if stamp.len() < 14 || !stamp.as_bytes()[..14].iter().all(u8::is_ascii_digit) {
            return None;
        }
        // Anything after the digits is a replay modifier such as "id_".
        if !stamp[14..].chars().all(|c| c.is_ascii_alphabetic() || c == '_') {
            return None;
        }
        let Some(capture) = parse_ts14(&stamp[..14]) else {
            return Some(Err(ArchiveError::MalformedArchiveUri(uri.to_string())));
        };
        match Url::parse(tail) {
            Ok(t) if matches!(t.scheme(), "http" | "https") => {
                Some(Ok((capture, tail.to_string())))
            }
            _ => Some(Err(ArchiveError::MalformedArchiveUri(uri.to_string()))),
        }
    }
}

/// Format a capture time as the 14-digit archive path timestamp.
pub fn format_ts14(dt: DateTime<Utc>) -> String {
    dt.format("%Y%m%d%H%M%S").to_string()
}

/// Parse a 14-digit archive path timestamp.
pub fn parse_ts14(s: &str) -> Option<DateTime<Utc>> {
    if s.len() != 14 {
        return None;
    }
    NaiveDateTime::parse_from_str(s, "%Y%m%d%H%M%S")
        .ok()
        .map(|dt| dt.and_utc())
}
