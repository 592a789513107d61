//! Ground truth for one simulated case: which doors are physically closed
//! and which areas the robot must not enter.

use std::collections::{BTreeMap, BTreeSet};

use crate::map::ProjectedMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoorState {
    Open,
    Closed,
}

#[derive(Debug, Clone, Default)]
pub struct WorldState {
    door_state: BTreeMap<i64, DoorState>,
    pub restricted_truth: BTreeSet<i64>,
}

impl WorldState {
    pub fn new(closed: impl IntoIterator<Item = i64>, restricted: impl IntoIterator<Item = i64>) -> Self {
        WorldState {
            door_state: closed.into_iter().map(|p| (p, DoorState::Closed)).collect(),
            restricted_truth: restricted.into_iter().collect(),
        }
    }

    /// Doors default to open; only closures are stored.
    pub fn door(&self, passage: i64) -> DoorState {
        self.door_state.get(&passage).copied().unwrap_or(DoorState::Open)
    }

    pub fn is_closed(&self, passage: i64) -> bool {
        self.door(passage) == DoorState::Closed
    }

    pub fn closed_passages(&self) -> Vec<i64> {
        self.door_state
            .iter()
            .filter(|(_, s)| **s == DoorState::Closed)
            .map(|(p, _)| *p)
            .collect()
    }

    pub fn is_restricted(&self, area: i64) -> bool {
        self.restricted_truth.contains(&area)
    }

    /// Every keyed passage must exist in the map.
    pub fn check_against(&self, map: &ProjectedMap) -> Result<(), i64> {
        for p in self.door_state.keys() {
            if map.passage(*p).is_none() {
                return Err(*p);
            }
        }
        Ok(())
    }
}
