//! LLM copilot: passage cost evaluation and navigation event monitoring
//! behind a pluggable chat backend, with strict JSON contracts and a
//! deterministic rule backend for offline runs and tests.

mod backend;
mod events;
mod ops;
pub mod resolve;
mod rule;
mod schema;
mod types;

pub use backend::{ChatBackend, HttpBackend, ScriptedBackend, ENV_API_KEY, ENV_BASE_URL};
pub use events::{expire_events, EventRecord, EventStore};
pub use ops::{approve_path, evaluate_passages, ingest_notification};
pub use resolve::{AreaCatalog, Resolution, SectorExpansion};
pub use rule::{RuleBackend, BASE_COST_AUTOMATIC, BASE_COST_ELEVATOR, BASE_COST_HANDLE, BASE_COST_OPEN, STUBBORN_COST};
pub use schema::{normalize_llm_json, SchemaId};
pub use types::{
    ApprovalVerdict, ExperienceStats, Locomotion, Outcome, PassageCostMap, PassageStats,
    RobotCapabilities, VerticalConnector, RECENT_WINDOW,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CopilotError {
    #[error("backend failure: {0}")]
    Backend(String),
    #[error("unrepairable {schema} output: {reason}")]
    Unrepairable { schema: &'static str, reason: String },
    #[error("destination \"{query}\" does not resolve to exactly one area; candidates: {}", candidates.join(", "))]
    DestinationUnresolvable { query: String, candidates: Vec<String> },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_osmag;
    use chrono::{DateTime, Utc};

    fn doc() -> crate::map::MapDocument {
        let xml = std::fs::read_to_string(format!(
            "{}/../../fixtures/campus_floor1.osm",
            env!("CARGO_MANIFEST_DIR")
        ))
        .unwrap();
        parse_osmag(&xml).unwrap()
    }

    fn t(s: &str) -> DateTime<Utc> {
        s.parse().unwrap()
    }

    #[test]
    fn rule_backend_prices_doors_from_type_and_experience() {
        let doc = doc();
        let backend = RuleBackend::new();
        let caps = RobotCapabilities::wheeled();

        // empty stats: handle doors cost 5, automatic and open cost 0
        let stats = ExperienceStats::default();
        let costs =
            evaluate_passages(&backend, "go to the Robotics Training Lab", &doc, &stats, &caps).unwrap();
        assert_eq!(costs.destination_area, 112);
        assert_eq!(costs.cost(204), BASE_COST_HANDLE); // B101 handle door
        assert_eq!(costs.cost(205), 0.0); // automatic
        assert_eq!(costs.cost(207), 0.0); // open

        // three straight failures price a passage out entirely
        let mut stats = ExperienceStats::default();
        for _ in 0..3 {
            stats.record(205, Outcome::Failure);
        }
        let costs = evaluate_passages(&backend, "go to D101", &doc, &stats, &caps).unwrap();
        assert_eq!(costs.destination_area, 108);
        assert_eq!(costs.cost(205), STUBBORN_COST);

        // mixed history: base + 100 * f / (s + f + 1)
        let mut stats = ExperienceStats::default();
        stats.record(204, Outcome::Failure);
        stats.record(204, Outcome::Success);
        let costs = evaluate_passages(&backend, "go to D101", &doc, &stats, &caps).unwrap();
        assert_eq!(costs.cost(204), BASE_COST_HANDLE + 100.0 / 3.0);
    }

    #[test]
    fn evaluator_monotone_under_added_failures() {
        let doc = doc();
        let backend = RuleBackend::new();
        let caps = RobotCapabilities::wheeled();
        let mut stats = ExperienceStats::default();
        let mut last = 0.0;
        for _ in 0..6 {
            stats.record(216, Outcome::Failure);
            let costs = evaluate_passages(&backend, "go to D101", &doc, &stats, &caps).unwrap();
            let c = costs.cost(216);
            assert!(c >= last, "cost should never drop when failures accumulate");
            last = c;
        }
        assert_eq!(last, STUBBORN_COST);
    }

    #[test]
    fn irrelevant_notifications_are_dropped() {
        let doc = doc();
        let backend = RuleBackend::new();
        let mut store = EventStore::new();
        let rec = ingest_notification(
            &backend,
            "Hot water will be shut off in the dormitories tonight.",
            t("2026-03-02T08:00:00Z"),
            &doc,
            &mut store,
        )
        .unwrap();
        assert!(rec.is_none());
        assert!(store.records.is_empty());
    }

    #[test]
    fn maintenance_notification_becomes_a_timed_event() {
        let doc = doc();
        let backend = RuleBackend::new();
        let mut store = EventStore::new();
        let rec = ingest_notification(
            &backend,
            "Robotics Training Lab closed for maintenance today 09:00-17:00.",
            t("2026-03-02T08:00:00Z"),
            &doc,
            &mut store,
        )
        .unwrap()
        .expect("navigation relevant");
        assert_eq!(rec.areas_to_avoid, vec!["Robotics Training Lab"]);
        assert_eq!(rec.start, t("2026-03-02T09:00:00Z"));
        assert_eq!(rec.end, t("2026-03-02T17:00:00Z"));
        assert_eq!(store.records.len(), 1);
    }

    #[test]
    fn sector_drill_splits_hard_rooms_from_soft_corridors() {
        let doc = doc();
        let backend = RuleBackend::new();
        let mut store = EventStore::new();
        let rec = ingest_notification(
            &backend,
            "Fire drill in the Lobby and B sector, 14:00-15:00.",
            t("2026-03-02T13:30:00Z"),
            &doc,
            &mut store,
        )
        .unwrap()
        .expect("relevant");
        assert_eq!(rec.areas_to_avoid, vec!["B101", "B102", "Lobby"]);
        assert_eq!(rec.areas_try_to_avoid, vec!["Corridor B"]);
    }

    #[test]
    fn approval_blocks_event_areas_and_stairs() {
        let doc = doc();
        let backend = RuleBackend::new();
        let caps = RobotCapabilities::wheeled();
        let now = t("2026-03-02T12:00:00Z");

        // empty store: everything is valid
        let store = EventStore::new();
        let verdict = approve_path(&backend, &[107, 101, 108], &store, now, &caps, &doc).unwrap();
        assert!(verdict.is_valid);

        // active lobby event: path through the lobby is vetoed
        let mut store = EventStore::new();
        ingest_notification(
            &backend,
            "Graduation party in the Lobby today 10:00-18:00; the lobby is closed to robots.",
            t("2026-03-02T09:00:00Z"),
            &doc,
            &mut store,
        )
        .unwrap();
        let verdict = approve_path(&backend, &[107, 101, 108], &store, now, &caps, &doc).unwrap();
        assert!(!verdict.is_valid);
        assert_eq!(verdict.areas_to_avoid, vec![101]);

        // disjoint path stays valid under the same store
        let verdict = approve_path(&backend, &[107, 102, 105], &store, now, &caps, &doc).unwrap();
        assert!(verdict.is_valid);
    }

    #[test]
    fn lying_backend_is_overridden_to_invalid() {
        let doc = doc();
        let caps = RobotCapabilities::wheeled();
        let now = t("2026-03-02T12:00:00Z");
        let mut store = EventStore::new();
        ingest_notification(
            &RuleBackend::new(),
            "Graduation party in the Lobby today 10:00-18:00; the lobby is closed to robots.",
            t("2026-03-02T09:00:00Z"),
            &doc,
            &mut store,
        )
        .unwrap();
        let liar = ScriptedBackend::new(vec![
            r#"{"is_valid": true, "areas_to_avoid": [], "areas_try_to_avoid": [], "rationale": "looks fine"}"#.into(),
        ]);
        let verdict = approve_path(&liar, &[107, 101, 108], &store, now, &caps, &doc).unwrap();
        assert!(!verdict.is_valid);
        assert_eq!(verdict.areas_to_avoid, vec![101]);
    }

    #[test]
    fn unrepairable_approval_falls_back_to_rule_backend() {
        let doc = doc();
        let caps = RobotCapabilities::wheeled();
        let now = t("2026-03-02T12:00:00Z");
        let store = EventStore::new();
        let broken = ScriptedBackend::new(vec![
            "I cannot determine".into(),
            "still not json".into(),
        ]);
        let verdict = approve_path(&broken, &[107, 102], &store, now, &caps, &doc).unwrap();
        assert_eq!(broken.calls(), 2); // one retry, then the fallback takes over
        assert!(verdict.is_valid);
    }

    #[test]
    fn unrepairable_evaluator_errors_after_exactly_one_retry() {
        let doc = doc();
        let caps = RobotCapabilities::wheeled();
        let stats = ExperienceStats::default();
        let broken = ScriptedBackend::new(vec!["garbage".into(), "more garbage".into(), "unused".into()]);
        let err = evaluate_passages(&broken, "go to D101", &doc, &stats, &caps);
        assert!(matches!(err, Err(CopilotError::Unrepairable { .. })));
        assert_eq!(broken.calls(), 2);
    }
}
