//! The plan/approve/replan loop with the navigation event monitor.

use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use serde::Serialize;

use crate::copilot::{approve_path, ApprovalVerdict, ChatBackend, EventStore, RobotCapabilities};
use crate::graph::AreaGraph;
use crate::grid::AreaGrids;
use crate::map::{MapDocument, ProjectedMap};

use super::search::{shortest_path, PathPlan};
use super::task_graph::build_task_graph;
use super::{PlanError, PlanRequest, PlannerConfig};

/// One round of the loop: the candidate plan and the monitor's answer.
#[derive(Debug, Clone, Serialize)]
pub struct ApprovalRound {
    pub round: usize,
    pub plan: PathPlan,
    pub verdict: ApprovalVerdict,
}

/// Plans, asks the monitor, folds vetoed areas into the avoid sets, and
/// replans until a plan is approved. Every round except the last carries
/// an invalid verdict. Terminates within `min(max_rounds, |areas|)` rounds.
#[allow(clippy::too_many_arguments)]
pub fn plan_with_approval(
    graph: &AreaGraph,
    doc: &MapDocument,
    map: &ProjectedMap,
    grids: &mut AreaGrids,
    req: &PlanRequest,
    monitor: &dyn ChatBackend,
    store: &EventStore,
    now: DateTime<Utc>,
    caps: &RobotCapabilities,
    max_rounds: usize,
    config: &PlannerConfig,
) -> Result<(PathPlan, Vec<ApprovalRound>), PlanError> {
    assert!(max_rounds >= 1);
    let mut req = req.clone();
    let mut trace: Vec<ApprovalRound> = Vec::new();
    let budget = max_rounds.min(doc.areas.len()).max(1);

    for round in 1..=budget {
        let tg = build_task_graph(graph, map, grids, &req, config)?;
        let plan = shortest_path(&tg, &req.costs, &req.soft_avoid, config).ok_or_else(|| {
            PlanError::NoPath { hard_avoid: req.hard_avoid.iter().copied().collect() }
        })?;

        let verdict = approve_path(monitor, &plan.areas, store, now, caps, doc)?;
        let approved = verdict.is_valid;
        let new_hard: BTreeSet<i64> = verdict.areas_to_avoid.iter().copied().collect();
        let new_soft: BTreeSet<i64> = verdict.areas_try_to_avoid.iter().copied().collect();
        trace.push(ApprovalRound { round, plan: plan.clone(), verdict });

        if approved {
            return Ok((plan, trace));
        }
        let before = (req.hard_avoid.len(), req.soft_avoid.len());
        req.hard_avoid.extend(new_hard);
        req.soft_avoid.extend(new_soft);
        if (req.hard_avoid.len(), req.soft_avoid.len()) == before {
            // the monitor vetoed without naming anything new; replanning
            // would reproduce the same plan forever
            return Err(PlanError::RoundsExhausted { rounds: round });
        }
    }
    Err(PlanError::RoundsExhausted { rounds: budget })
}
