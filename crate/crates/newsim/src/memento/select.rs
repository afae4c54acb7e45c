//! Nearest-memento selection.

use chrono::{DateTime, Utc};

use super::{MementoRecord, TimeMap, TimeMapError};

/// Pick the memento whose capture time is nearest `target`; an exact
/// distance tie goes to the earlier capture.
pub fn select_nearest(
    tm: &TimeMap,
    target: DateTime<Utc>,
) -> Result<&MementoRecord, TimeMapError> {
    let mut best: Option<(&MementoRecord, i64)> = None;
    for m in &tm.mementos {
        let distance = (m.capture_datetime - target).num_seconds().abs();
        // Strict improvement only: the list is ascending, so on a tie
        // the earlier capture stays.
        if best.map(|(_, d)| distance < d).unwrap_or(true) {
            best = Some((m, distance));
        }
    }
    best.map(|(m, _)| m).ok_or(TimeMapError::Empty)
}
