//! Deterministic door-state simulator and the case/trial benchmark.

mod baseline;
mod case;
mod bench;
mod executor;
mod ledger;
mod report;
mod world;

pub use baseline::{baseline_navigate, BaselineContext};
pub use case::{CaseSpec, TrialStart};
pub use bench::{prepare_case, run_configuration, Configuration, PreparedCase};
pub use executor::{execute_task, ExecSegment, PlanSource, TrialResult};
pub use ledger::{ExperienceLedger, LedgerRecord};
pub use report::{
    overlay_svg, summarize, summary_csv, summary_table, trials_csv, write_case_outputs,
    ConfigSummary, CSV_HEADER,
};
pub use world::{DoorState, WorldState};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("case error: {0}")]
    Case(String),
    #[error("grid: {0}")]
    Grid(#[from] crate::grid::GridError),
    #[error("graph: {0}")]
    Graph(#[from] crate::graph::GraphError),
    #[error("planner: {0}")]
    Plan(#[from] crate::planner::PlanError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
