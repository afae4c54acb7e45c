//! Archival-density statistics: capture counts per hour of day and
//! selection-offset distributions.

use chrono::{DateTime, Datelike, Timelike, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{MementoRecord, TimeMap};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("no selections to summarize")]
    EmptyInput,
}

/// Memento count per hour of day (0-23) in a display timezone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HourHistogram(pub [u64; 24]);

impl HourHistogram {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Hour with the highest count; ties go to the earlier hour.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (h, &c) in self.0.iter().enumerate() {
            if c > self.0[best] {
                best = h;
            }
        }
        best
    }
}

/// Signed offsets of selected captures from their targets, minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetSummary {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

/// Five-number summary used by the archival report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchivalStats {
    pub hour_histogram: HourHistogram,
    pub offset_minutes: Vec<f64>,
    pub summary: OffsetSummary,
}

/// Count mementos per display-timezone hour of day.
///
/// `months` filters on the capture's UTC year-month; empty means all.
/// `utc_offset_hours` is a fixed offset (no DST arithmetic): Eastern
/// Standard Time is -5.
pub fn archival_histogram(
    tms: &[TimeMap],
    months: &[(i32, u32)],
    utc_offset_hours: i32,
) -> HourHistogram {
    let mut buckets = [0u64; 24];
    for tm in tms {
        for m in &tm.mementos {
            if !months.is_empty()
                && !months
                    .iter()
                    .any(|&(y, mo)| m.capture_datetime.year() == y && m.capture_datetime.month() == mo)
            {
                continue;
            }
            let hour = (m.capture_datetime.hour() as i32 + utc_offset_hours).rem_euclid(24);
            buckets[hour as usize] += 1;
        }
    }
    HourHistogram(buckets)
}

/// Signed offset of a capture from its target, in minutes; negative
/// when the capture precedes the target.
pub fn offset_minutes(selected: &MementoRecord, target: DateTime<Utc>) -> f64 {
    (selected.capture_datetime - target).num_seconds() as f64 / 60.0
}

/// Offsets plus min/mean/max over a set of (selection, target) pairs.
pub fn offset_stats(
    selections: &[(MementoRecord, DateTime<Utc>)],
) -> Result<(Vec<f64>, OffsetSummary), StatsError> {
    if selections.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let offsets: Vec<f64> = selections
        .iter()
        .map(|(m, t)| offset_minutes(m, *t))
        .collect();
    let min = offsets.iter().copied().fold(f64::INFINITY, f64::min);
    let max = offsets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = offsets.iter().sum::<f64>() / offsets.len() as f64;
    Ok((offsets, OffsetSummary { min, mean, max }))
}

/// Five-number summary with linearly interpolated quartiles.
pub fn five_number_summary(values: &[f64]) -> Result<FiveNumberSummary, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let quantile = |p: f64| -> f64 {
        let h = (sorted.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    };
    Ok(FiveNumberSummary {
        min: sorted[0],
        q1: quantile(0.25),
        median: quantile(0.5),
        q3: quantile(0.75),
        max: sorted[sorted.len() - 1],
    })
}
