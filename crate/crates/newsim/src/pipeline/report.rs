//! Archival report: per-site capture counts by hour of day and the
//! distribution of selection offsets for one month — the plot-ready
//! data behind "when does the archive capture these sites".

use std::fs;
use std::path::Path;

use chrono::{Datelike, NaiveDate};

use crate::memento::{
    archival_histogram, five_number_summary, offset_minutes, parse_timemap, select_nearest,
    Fetcher, FiveNumberSummary, HourHistogram, TimeMap,
};

use super::{PipelineError, RunConfig};

pub const HOURS_FILE: &str = "archival_hours.csv";
pub const OFFSETS_FILE: &str = "archival_offsets.csv";

#[derive(Debug, Clone)]
pub struct ArchivalReport {
    /// Per site, in config order; sites without captures keep a
    /// zeroed histogram row.
    pub hours: Vec<(String, HourHistogram)>,
    /// Per site with at least one selectable day.
    pub offsets: Vec<(String, FiveNumberSummary)>,
}

impl ArchivalReport {
    /// Histogram summed across sites.
    pub fn total_histogram(&self) -> HourHistogram {
        let mut total = [0u64; 24];
        for (_, h) in &self.hours {
            for (b, &c) in total.iter_mut().zip(h.0.iter()) {
                *b += c;
            }
        }
        HourHistogram(total)
    }
}

/// Build the archival report for one month and write both CSVs.
pub fn report_archival(
    cfg: &RunConfig,
    fetcher: &Fetcher,
    month: (i32, u32),
) -> Result<ArchivalReport, PipelineError> {
    let mut hours = Vec::new();
    let mut offsets = Vec::new();

    for site in &cfg.sites {
        let tm_uri = cfg.archive.timemap_uri(&site.homepage_uri);
        let tm: Option<TimeMap> = match fetcher.fetch(&tm_uri) {
            Ok(body) => {
                match parse_timemap(&String::from_utf8_lossy(&body.body), &site.homepage_uri) {
                    Ok(tm) => Some(tm),
                    Err(e) => {
                        eprintln!("report: {}: {e}", site.site_id);
                        None
                    }
                }
            }
            Err(e) => {
                eprintln!("report: {}: {e}", site.site_id);
                None
            }
        };

        let Some(tm) = tm else {
            hours.push((site.site_id.clone(), HourHistogram([0; 24])));
            continue;
        };

        hours.push((
            site.site_id.clone(),
            archival_histogram(std::slice::from_ref(&tm), &[month], cfg.utc_offset_hours),
        ));

        // A day joins the offset distribution only when the archive
        // actually covered it: the selection must land within half the
        // daily sampling interval of the target (or within the run's
        // own offset cutoff when one is set).
        let window = cfg.max_offset_minutes.unwrap_or(720.0);
        let mut site_offsets = Vec::new();
        for date in month_days(month) {
            let target = date.and_time(cfg.target_time).and_utc();
            if let Ok(selected) = select_nearest(&tm, target) {
                let offset = offset_minutes(selected, target);
                if offset.abs() < window {
                    site_offsets.push(offset);
                }
            }
        }
        if let Ok(summary) = five_number_summary(&site_offsets) {
            offsets.push((site.site_id.clone(), summary));
        }
    }

    let report = ArchivalReport { hours, offsets };
    write_report(&report, &cfg.out_dir)?;
    Ok(report)
}

fn month_days(month: (i32, u32)) -> impl Iterator<Item = NaiveDate> {
    let (y, m) = month;
    let first = NaiveDate::from_ymd_opt(y, m, 1).expect("validated month");
    first.iter_days().take_while(move |d| d.month() == m && d.year() == y)
}

fn write_report(report: &ArchivalReport, out_dir: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(out_dir).map_err(|e| PipelineError::OutputUnwritable {
        path: out_dir.to_path_buf(),
        message: e.to_string(),
    })?;
    let unwritable = |path: &Path, e: csv::Error| PipelineError::OutputUnwritable {
        path: path.to_path_buf(),
        message: e.to_string(),
    };

    let hours_path = out_dir.join(HOURS_FILE);
    let mut w = csv::Writer::from_path(&hours_path).map_err(|e| unwritable(&hours_path, e))?;
    let mut header = vec!["site".to_string()];
    header.extend((0..24).map(|h| format!("h{h:02}")));
    w.write_record(&header).map_err(|e| unwritable(&hours_path, e))?;
    for (site, hist) in &report.hours {
        let mut row = vec![site.clone()];
        row.extend(hist.0.iter().map(u64::to_string));
        w.write_record(&row).map_err(|e| unwritable(&hours_path, e))?;
    }
    w.flush().map_err(|e| PipelineError::OutputUnwritable {
        path: hours_path.clone(),
        message: e.to_string(),
    })?;

    let offsets_path = out_dir.join(OFFSETS_FILE);
    let mut w = csv::Writer::from_path(&offsets_path).map_err(|e| unwritable(&offsets_path, e))?;
    w.write_record(["site", "min", "q1", "median", "q3", "max"])
        .map_err(|e| unwritable(&offsets_path, e))?;
    for (site, s) in &report.offsets {
        w.write_record([
            site.clone(),
            format!("{:.3}", s.min),
            format!("{:.3}", s.q1),
            format!("{:.3}", s.median),
            format!("{:.3}", s.q3),
            format!("{:.3}", s.max),
        ])
        .map_err(|e| unwritable(&offsets_path, e))?;
    }
    w.flush().map_err(|e| PipelineError::OutputUnwritable {
        path: offsets_path,
        message: e.to_string(),
    })
}
