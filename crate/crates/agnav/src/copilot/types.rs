//! Data carried between the copilot modules and the planner.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

/// Result of one attempt to drive through a passage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Success,
    Failure,
}

pub const RECENT_WINDOW: usize = 5;

/// Per-passage traversal record summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PassageStats {
    pub successes: u64,
    pub failures: u64,
    /// Most recent outcomes, oldest first, capped at [`RECENT_WINDOW`].
    pub recent: VecDeque<Outcome>,
}

impl PassageStats {
    pub fn record(&mut self, outcome: Outcome) {
        match outcome {
            Outcome::Success => self.successes += 1,
            Outcome::Failure => self.failures += 1,
        }
        self.recent.push_back(outcome);
        while self.recent.len() > RECENT_WINDOW {
            self.recent.pop_front();
        }
    }

    /// True when the last `n` outcomes exist and are all failures.
    pub fn recent_all_failures(&self, n: usize) -> bool {
        self.recent.len() >= n && self.recent.iter().rev().take(n).all(|o| *o == Outcome::Failure)
    }
}

/// Experience view handed to the cost evaluator.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperienceStats {
    pub per_passage: BTreeMap<i64, PassageStats>,
}

impl ExperienceStats {
    pub fn record(&mut self, passage: i64, outcome: Outcome) {
        self.per_passage.entry(passage).or_default().record(outcome);
    }

    pub fn get(&self, passage: i64) -> Option<&PassageStats> {
        self.per_passage.get(&passage)
    }
}

/// Extra traversal cost per passage, in meters-equivalent, plus the
/// destination the instruction resolved to.
#[derive(Debug, Clone, PartialEq)]
pub struct PassageCostMap {
    pub costs: BTreeMap<i64, f64>,
    pub destination_area: i64,
    pub rationale: String,
}

impl PassageCostMap {
    /// Zero-cost map targeting `destination_area`.
    pub fn zero(destination_area: i64) -> Self {
        PassageCostMap { costs: BTreeMap::new(), destination_area, rationale: String::new() }
    }

    /// Passages the backend did not mention cost nothing.
    pub fn cost(&self, passage: i64) -> f64 {
        self.costs.get(&passage).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locomotion {
    Wheeled,
    Legged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerticalConnector {
    Elevator,
    Stairs,
}

/// What the robot can physically do; constrains path approval.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotCapabilities {
    pub locomotion: Locomotion,
    pub can_open_handle_doors: bool,
    usable_vertical: BTreeSet<VerticalConnector>,
}

impl RobotCapabilities {
    /// A wheeled robot can never use stairs; the constructor enforces it.
    pub fn new(
        locomotion: Locomotion,
        can_open_handle_doors: bool,
        vertical: impl IntoIterator<Item = VerticalConnector>,
    ) -> Self {
        let mut usable_vertical: BTreeSet<VerticalConnector> = vertical.into_iter().collect();
        if locomotion == Locomotion::Wheeled {
            usable_vertical.remove(&VerticalConnector::Stairs);
        }
        RobotCapabilities { locomotion, can_open_handle_doors, usable_vertical }
    }

    /// Standard wheeled platform: elevators only.
    pub fn wheeled() -> Self {
        RobotCapabilities::new(Locomotion::Wheeled, false, [VerticalConnector::Elevator])
    }

    pub fn can_use(&self, v: VerticalConnector) -> bool {
        self.usable_vertical.contains(&v)
    }

    pub fn describe(&self) -> String {
        let vertical: Vec<&str> = self
            .usable_vertical
            .iter()
            .map(|v| match v {
                VerticalConnector::Elevator => "elevator",
                VerticalConnector::Stairs => "stairs",
            })
            .collect();
        format!(
            "locomotion: {}\ncan_open_handle_doors: {}\nusable_vertical_connectors: {}",
            match self.locomotion {
                Locomotion::Wheeled => "wheeled",
                Locomotion::Legged => "legged",
            },
            self.can_open_handle_doors,
            if vertical.is_empty() { "none".to_string() } else { vertical.join(", ") }
        )
    }
}

/// The monitor's answer to "may the robot drive this path right now?".
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApprovalVerdict {
    pub is_valid: bool,
    /// Blocking area ids (hard avoidance).
    pub areas_to_avoid: Vec<i64>,
    /// Areas to detour around when cheap (soft avoidance).
    pub areas_try_to_avoid: Vec<i64>,
    pub rationale: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wheeled_robots_cannot_take_stairs() {
        let caps = RobotCapabilities::new(
            Locomotion::Wheeled,
            true,
            [VerticalConnector::Elevator, VerticalConnector::Stairs],
        );
        assert!(caps.can_use(VerticalConnector::Elevator));
        assert!(!caps.can_use(VerticalConnector::Stairs));

        let legged = RobotCapabilities::new(Locomotion::Legged, true, [VerticalConnector::Stairs]);
        assert!(legged.can_use(VerticalConnector::Stairs));
    }

    #[test]
    fn recent_window_caps_at_five() {
        let mut s = PassageStats::default();
        for _ in 0..7 {
            s.record(Outcome::Failure);
        }
        s.record(Outcome::Success);
        assert_eq!(s.recent.len(), RECENT_WINDOW);
        assert_eq!(s.failures, 7);
        assert_eq!(s.successes, 1);
        assert!(!s.recent_all_failures(3));
        let mut t = PassageStats::default();
        t.record(Outcome::Success);
        t.record(Outcome::Failure);
        t.record(Outcome::Failure);
        t.record(Outcome::Failure);
        assert!(t.recent_all_failures(3));
    }
}
