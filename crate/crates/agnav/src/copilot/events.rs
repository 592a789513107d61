//! Tracked notification effects: timed avoid-areas records and their store.

use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::CopilotError;

/// One navigation-relevant notification, reduced to the areas it blocks
/// and the time window it applies to. Area lists hold canonical map names;
/// names the monitor could not resolve are kept in `unresolved`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub id: String,
    pub source_text: String,
    pub areas_to_avoid: Vec<String>,
    pub areas_try_to_avoid: Vec<String>,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub reason: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unresolved: Vec<String>,
}

impl EventRecord {
    pub fn is_active(&self, now: DateTime<Utc>) -> bool {
        self.start <= now && now <= self.end
    }
}

/// Append-mostly store of event records, persisted as a pretty JSON array.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventStore {
    pub records: Vec<EventRecord>,
}

impl EventStore {
    pub fn new() -> Self {
        EventStore::default()
    }

    pub fn push(&mut self, record: EventRecord) {
        self.records.push(record);
    }

    pub fn next_id(&self) -> String {
        format!("evt-{:03}", self.records.len() + 1)
    }

    pub fn active(&self, now: DateTime<Utc>) -> Vec<&EventRecord> {
        self.records.iter().filter(|r| r.is_active(now)).collect()
    }

    pub fn load(path: &Path) -> Result<Self, CopilotError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), CopilotError> {
        let mut text = serde_json::to_string_pretty(&self.records)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Drops records whose window has fully passed; survivors keep their order.
pub fn expire_events(store: &EventStore, now: DateTime<Utc>) -> EventStore {
    EventStore {
        records: store.records.iter().filter(|r| r.end >= now).cloned().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn record(id: &str, start: &str, end: &str) -> EventRecord {
        EventRecord {
            id: id.into(),
            source_text: "t".into(),
            areas_to_avoid: vec!["Lobby".into()],
            areas_try_to_avoid: vec![],
            start: start.parse().unwrap(),
            end: end.parse().unwrap(),
            reason: "r".into(),
            unresolved: vec![],
        }
    }

    #[test]
    fn expiry_keeps_order_and_drops_past_records() {
        let mut store = EventStore::new();
        store.push(record("a", "2026-03-01T08:00:00Z", "2026-03-01T18:00:00Z"));
        store.push(record("b", "2026-03-02T08:00:00Z", "2026-03-02T18:00:00Z"));
        let now = Utc.with_ymd_and_hms(2026, 3, 2, 9, 0, 0).unwrap();
        let kept = expire_events(&store, now);
        assert_eq!(kept.records.len(), 1);
        assert_eq!(kept.records[0].id, "b");

        assert!(expire_events(&EventStore::new(), now).records.is_empty());
    }

    #[test]
    fn active_window_is_inclusive() {
        let r = record("a", "2026-03-02T14:00:00Z", "2026-03-02T15:00:00Z");
        assert!(r.is_active("2026-03-02T14:00:00Z".parse().unwrap()));
        assert!(r.is_active("2026-03-02T15:00:00Z".parse().unwrap()));
        assert!(!r.is_active("2026-03-02T15:00:01Z".parse().unwrap()));
    }
}
