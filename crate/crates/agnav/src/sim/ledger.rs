//! Append-only passage experience log, persisted as JSON Lines. The
//! evaluator consumes the derived [`ExperienceStats`] view.

use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::copilot::{ExperienceStats, Outcome};

use super::SimError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub ts: String,
    pub task: String,
    pub passage: i64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Default)]
pub struct ExperienceLedger {
    records: Vec<LedgerRecord>,
    stats: ExperienceStats,
}

impl ExperienceLedger {
    pub fn new() -> Self {
        ExperienceLedger::default()
    }

    pub fn record(&mut self, ts: &str, task: &str, passage: i64, outcome: Outcome) {
        self.records.push(LedgerRecord {
            ts: ts.to_string(),
            task: task.to_string(),
            passage,
            outcome,
        });
        self.stats.record(passage, outcome);
    }

    pub fn records(&self) -> &[LedgerRecord] {
        &self.records
    }

    /// Derived per-passage counts; always consistent with the records.
    pub fn stats(&self) -> &ExperienceStats {
        &self.stats
    }

    pub fn save(&self, path: &Path) -> Result<(), SimError> {
        let mut f = std::fs::File::create(path)?;
        for r in &self.records {
            writeln!(f, "{}", serde_json::to_string(r)?)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let mut ledger = ExperienceLedger::new();
        for line in std::fs::read_to_string(path)?.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let r: LedgerRecord = serde_json::from_str(line)?;
            ledger.stats.record(r.passage, r.outcome);
            ledger.records.push(r);
        }
        Ok(ledger)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_stats_match_record_tallies() {
        let mut ledger = ExperienceLedger::new();
        ledger.record("t0", "case1", 205, Outcome::Failure);
        ledger.record("t1", "case1", 205, Outcome::Failure);
        ledger.record("t2", "case1", 205, Outcome::Success);
        ledger.record("t3", "case1", 207, Outcome::Success);

        let s = ledger.stats().get(205).unwrap();
        assert_eq!((s.successes, s.failures), (1, 2));
        let by_hand = ledger
            .records()
            .iter()
            .filter(|r| r.passage == 205 && r.outcome == Outcome::Failure)
            .count();
        assert_eq!(by_hand as u64, s.failures);
    }

    #[test]
    fn jsonl_round_trip() {
        let mut ledger = ExperienceLedger::new();
        ledger.record("2026-03-02T10:00:00Z", "case1", 205, Outcome::Failure);
        ledger.record("2026-03-02T10:01:00Z", "case1", 206, Outcome::Success);
        let dir = std::env::temp_dir().join("agnav_ledger_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ledger.jsonl");
        ledger.save(&path).unwrap();
        let back = ExperienceLedger::load(&path).unwrap();
        assert_eq!(back.records(), ledger.records());
        assert_eq!(back.stats(), ledger.stats());
    }
}
