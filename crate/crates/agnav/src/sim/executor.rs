//! Task execution against the simulated world: drive the plan passage by
//! passage, log successes and failures, and replan around closed doors
//! until the goal is reached or no route remains.

use std::collections::BTreeSet;

use crate::copilot::Outcome;
use crate::grid::AreaGrids;
use crate::map::{LocalPoint, ProjectedMap};
use crate::planner::{interior_anchor, ApprovalRound, PathPlan, PlanError, RobotPose};

use super::ledger::ExperienceLedger;
use super::world::WorldState;
use super::SimError;

/// One executed in-area drive segment (for overlays and motion checks).
#[derive(Debug, Clone)]
pub struct ExecSegment {
    pub area: i64,
    pub from: LocalPoint,
    pub to: LocalPoint,
    pub cells: Vec<LocalPoint>,
    pub length: f64,
}

/// Outcome of one trial.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub configuration: String,
    pub traveled_length: f64,
    pub restricted_entries: usize,
    pub replans: usize,
    pub reached: bool,
    pub trace: Vec<ApprovalRound>,
    pub executed: Vec<ExecSegment>,
}

/// Supplies an (approved) plan for the robot's current pose and the
/// passages already found impassable during this task. The executor lends
/// out its grids and the current experience view for the duration of the
/// call.
pub trait PlanSource {
    fn plan(
        &mut self,
        grids: &mut AreaGrids,
        stats: &crate::copilot::ExperienceStats,
        pose: &RobotPose,
        infeasible: &BTreeSet<i64>,
    ) -> Result<(PathPlan, Vec<ApprovalRound>), PlanError>;
}

impl<F> PlanSource for F
where
    F: FnMut(
        &mut AreaGrids,
        &crate::copilot::ExperienceStats,
        &RobotPose,
        &BTreeSet<i64>,
    ) -> Result<(PathPlan, Vec<ApprovalRound>), PlanError>,
{
    fn plan(
        &mut self,
        grids: &mut AreaGrids,
        stats: &crate::copilot::ExperienceStats,
        pose: &RobotPose,
        infeasible: &BTreeSet<i64>,
    ) -> Result<(PathPlan, Vec<ApprovalRound>), PlanError> {
        self(grids, stats, pose, infeasible)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn execute_task(
    plan_source: &mut dyn PlanSource,
    world: &WorldState,
    ledger: &mut ExperienceLedger,
    map: &ProjectedMap,
    grids: &mut AreaGrids,
    start: RobotPose,
    destination: i64,
    configuration: &str,
    task_label: &str,
) -> Result<TrialResult, SimError> {
    let mut pose = start;
    let mut infeasible: BTreeSet<i64> = BTreeSet::new();
    let mut result = TrialResult {
        configuration: configuration.to_string(),
        traveled_length: 0.0,
        restricted_entries: 0,
        replans: 0,
        reached: false,
        trace: Vec::new(),
        executed: Vec::new(),
    };
    if world.is_restricted(pose.area) {
        result.restricted_entries += 1;
    }
    let replan_budget = map.passages.len();
    let mut tick = 0usize;

    'task: loop {
        let (plan, rounds) = match plan_source.plan(grids, ledger.stats(), &pose, &infeasible) {
            Ok(ok) => ok,
            Err(PlanError::NoPath { .. } | PlanError::DestinationSealed { .. }) => break 'task,
            Err(e) => return Err(e.into()),
        };
        result.trace.extend(rounds);

        for (i, passage_id) in plan.passages.iter().enumerate() {
            let passage = map
                .passage(*passage_id)
                .ok_or_else(|| SimError::Case(format!("plan references unknown passage {passage_id}")))?;
            let mid = passage.midpoint();

            // drive up to the door inside the current area
            let seg = drive(grids, &mut result, pose.area, pose.position, mid)?;
            if !seg {
                break 'task; // walled off from its own door: give up
            }
            pose.position = mid;
            tick += 1;
            let ts = format!("t{tick:04}");

            if world.is_closed(*passage_id) {
                ledger.record(&ts, task_label, *passage_id, Outcome::Failure);
                infeasible.insert(*passage_id);
                result.replans += 1;
                if result.replans > replan_budget {
                    break 'task;
                }
                continue 'task; // replan from the door we are standing at
            }

            ledger.record(&ts, task_label, *passage_id, Outcome::Success);
            let next_area = plan.areas.get(i + 1).copied().ok_or_else(|| {
                SimError::Case("plan areas shorter than passage list".to_string())
            })?;
            pose.area = next_area;
            if world.is_restricted(next_area) {
                result.restricted_entries += 1;
            }
        }

        // final leg to the destination anchor
        let anchor = interior_anchor(map, destination, grids.resolution())
            .map_err(|e| SimError::Case(e.to_string()))?;
        drive(grids, &mut result, pose.area, pose.position, anchor)?;
        pose.position = anchor;
        result.reached = pose.area == destination;
        break 'task;
    }

    Ok(result)
}

/// Executes one in-area grid route, accumulating length and the overlay
/// polyline. Returns false when the two points are not connected.
fn drive(
    grids: &mut AreaGrids,
    result: &mut TrialResult,
    area: i64,
    from: LocalPoint,
    to: LocalPoint,
) -> Result<bool, SimError> {
    let path = match grids.route(area, from, to)? {
        Some(p) => p,
        None => return Ok(false),
    };
    let cells: Vec<LocalPoint> = {
        let grid = grids.grid(area)?;
        path.cells.iter().map(|(c, r)| grid.center_of(*c, *r)).collect()
    };
    result.traveled_length += path.length;
    result.executed.push(ExecSegment { area, from, to, cells, length: path.length });
    Ok(true)
}
