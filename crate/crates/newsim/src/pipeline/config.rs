//! Run configuration: sites, date range, target time, k values, and
//! I/O locations.

use std::path::PathBuf;

use chrono::{Datelike, NaiveDate, NaiveTime};

use crate::archive::ArchiveConfig;
use crate::extract::{ConfigFile, SiteConfig};
use crate::memento::FetchPolicy;

use super::PipelineError;

/// Everything one scoring run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub archive: ArchiveConfig,
    pub sites: Vec<SiteConfig>,
    /// Inclusive date span.
    pub from: NaiveDate,
    pub to: NaiveDate,
    /// Time of day, in UTC, the daily memento is aimed at.
    pub target_time: NaiveTime,
    /// Fixed display offset for archival reports (no DST arithmetic).
    pub utc_offset_hours: i32,
    /// Sorted ascending, all >= 1.
    pub k_values: Vec<usize>,
    pub cache_dir: PathBuf,
    pub offline: bool,
    pub out_dir: PathBuf,
    /// Recompute days already present in the manifest.
    pub force: bool,
    pub fetch_policy: FetchPolicy,
    /// Dump each day's similarity matrix beside the outputs.
    pub dump_matrices: bool,
    /// Reject selections farther than this many minutes from the
    /// target; no cutoff by default.
    pub max_offset_minutes: Option<f64>,
    /// Also mask same-site pairs out of the collection score.
    pub mask_intra_site: bool,
}

/// 01:00 UTC, which is 8 PM Eastern Standard Time.
pub fn default_target_time() -> NaiveTime {
    NaiveTime::from_hms_opt(1, 0, 0).unwrap()
}

pub fn default_k_values() -> Vec<usize> {
    vec![1, 3, 10]
}

impl RunConfig {
    /// Assemble a run from a loaded config file, normalizing and
    /// validating the k values and date range.
    #[allow(clippy::too_many_arguments)]
    pub fn from_config_file(
        file: ConfigFile,
        from: NaiveDate,
        to: NaiveDate,
        cache_dir: PathBuf,
        out_dir: PathBuf,
    ) -> Result<Self, PipelineError> {
        let cfg = Self {
            archive: file.archive,
            sites: file.sites,
            from,
            to,
            target_time: default_target_time(),
            utc_offset_hours: -5,
            k_values: default_k_values(),
            cache_dir,
            offline: false,
            out_dir,
            force: false,
            fetch_policy: FetchPolicy::default(),
            dump_matrices: false,
            max_offset_minutes: None,
            mask_intra_site: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.sites.is_empty() {
            return Err(PipelineError::Config("no sites configured".into()));
        }
        if self.from > self.to {
            return Err(PipelineError::Config(format!(
                "empty date range: {} is after {}",
                self.from, self.to
            )));
        }
        if self.k_values.is_empty() {
            return Err(PipelineError::Config("no k values".into()));
        }
        if self.k_values.contains(&0) {
            return Err(PipelineError::Config("k values must be >= 1".into()));
        }
        if self.k_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PipelineError::Config(
                "k values must be strictly ascending".into(),
            ));
        }
        if self.sites.iter().any(|s| s.max_stories == Some(0)) {
            return Err(PipelineError::Config("max_stories must be >= 1".into()));
        }
        Ok(())
    }

    /// Sort and deduplicate k values in place.
    pub fn normalize_k_values(&mut self) {
        self.k_values.sort_unstable();
        self.k_values.dedup();
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.from.iter_days().take_while(move |d| *d <= self.to)
    }
}

/// Parse a `HH:MMZ` target time.
pub fn parse_target_time(s: &str) -> Result<NaiveTime, String> {
    let inner = s
        .strip_suffix('Z')
        .ok_or_else(|| format!("target time {s:?} must end in Z (UTC)"))?;
    NaiveTime::parse_from_str(inner, "%H:%M").map_err(|e| format!("bad target time {s:?}: {e}"))
}

/// Parse a `YYYY-MM` month.
pub fn parse_month(s: &str) -> Result<(i32, u32), String> {
    let date = NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d")
        .map_err(|e| format!("bad month {s:?}: {e}"))?;
    Ok((date.year(), date.month()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_time_parses_and_rejects() {
        assert_eq!(parse_target_time("01:00Z").unwrap(), default_target_time());
        assert_eq!(
            parse_target_time("23:45Z").unwrap(),
            NaiveTime::from_hms_opt(23, 45, 0).unwrap()
        );
        assert!(parse_target_time("01:00").is_err());
        assert!(parse_target_time("25:00Z").is_err());
    }

    #[test]
    fn month_parses() {
        assert_eq!(parse_month("2016-11").unwrap(), (2016, 11));
        assert!(parse_month("2016").is_err());
        assert!(parse_month("2016-13").is_err());
    }

    #[test]
    fn date_iteration_is_inclusive() {
        let from = NaiveDate::from_ymd_opt(2016, 11, 1).unwrap();
        let to = NaiveDate::from_ymd_opt(2016, 11, 3).unwrap();
        let cfg = RunConfig {
            archive: ArchiveConfig::new("https://archive.example").unwrap(),
            sites: vec![],
            from,
            to,
            target_time: default_target_time(),
            utc_offset_hours: -5,
            k_values: default_k_values(),
            cache_dir: "/tmp/c".into(),
            offline: true,
            out_dir: "/tmp/o".into(),
            force: false,
            fetch_policy: FetchPolicy::default(),
            dump_matrices: false,
            max_offset_minutes: None,
            mask_intra_site: false,
        };
        assert_eq!(cfg.dates().count(), 3);
    }
}
