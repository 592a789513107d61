//! Area-graph navigation with an LLM copilot.
//!
//! The stack plans over an osmAG semantic map: polygonal areas linked by
//! door passages. Passages form the vertices of the planning graph and
//! precomputed intra-area grid distances its edges. Two copilot modules,
//! a passage-cost evaluator and a navigation-event monitor, price doors
//! from experience and veto paths against tracked notifications. A
//! deterministic door-state simulator benchmarks the full loop against a
//! move_base-style occupancy-grid baseline.

pub mod copilot;
pub mod graph;
pub mod grid;
pub mod map;
pub mod planner;
pub mod sim;

pub use map::MapError;
