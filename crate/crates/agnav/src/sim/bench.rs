//! Case runner: executes a case under each configuration, sharing the
//! experience ledger across trials within a configuration and resetting it
//! between configurations, exactly one world per case.

use std::collections::BTreeSet;

use crate::copilot::{
    evaluate_passages, ingest_notification, ChatBackend, EventStore, PassageCostMap,
    RobotCapabilities,
};
use crate::graph::{build_area_graph, precompute_distances, AreaGraph, IntraAreaDistanceTable};
use crate::grid::{AreaGrids, DEFAULT_RESOLUTION};
use crate::map::{parse_osmag, project, LocalPoint, MapDocument, ProjectedMap};
use crate::planner::{
    build_task_graph, plan_with_approval, shortest_path, PlanError, PlanRequest, PlannerConfig,
    RobotPose,
};

use super::baseline::{baseline_navigate, BaselineContext};
use super::case::CaseSpec;
use super::executor::{execute_task, TrialResult};
use super::ledger::ExperienceLedger;
use super::world::WorldState;
use super::SimError;

/// The five benchmark configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Configuration {
    /// Evaluator + monitor + experience (the whole stack).
    Full,
    /// No event monitor: notifications are never ingested.
    NoMonitor,
    /// No cost evaluator: every passage costs zero, no experience pricing.
    NoEvaluator,
    /// Grid baseline, obstacle memory wiped between trials.
    BaselineClearing,
    /// Grid baseline, obstacle memory kept between trials.
    BaselineMemory,
}

impl Configuration {
    pub const ALL: [Configuration; 5] = [
        Configuration::Full,
        Configuration::NoMonitor,
        Configuration::NoEvaluator,
        Configuration::BaselineClearing,
        Configuration::BaselineMemory,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Configuration::Full => "full",
            Configuration::NoMonitor => "no_monitor",
            Configuration::NoEvaluator => "no_evaluator",
            Configuration::BaselineClearing => "baseline_clearing",
            Configuration::BaselineMemory => "baseline_memory",
        }
    }

    pub fn parse(s: &str) -> Option<Configuration> {
        Configuration::ALL.iter().copied().find(|c| c.label() == s)
    }
}

/// A loaded case with its map artifacts, ready to run.
pub struct PreparedCase {
    pub spec: CaseSpec,
    pub doc: MapDocument,
    pub map: ProjectedMap,
    pub table: IntraAreaDistanceTable,
    pub graph: AreaGraph,
    pub world: WorldState,
    pub destination: i64,
    pub level: i32,
}

pub fn prepare_case(spec: CaseSpec) -> Result<PreparedCase, SimError> {
    let xml = std::fs::read_to_string(&spec.map_file)
        .map_err(|e| SimError::Case(format!("{}: {e}", spec.map_file.display())))?;
    let doc = parse_osmag(&xml).map_err(|e| SimError::Case(e.to_string()))?;
    let map = project(&doc).map_err(|e| SimError::Case(e.to_string()))?;
    let table = precompute_distances(&map, DEFAULT_RESOLUTION)?;
    let graph = build_area_graph(&map, &table).map_err(|e| SimError::Case(e.to_string()))?;

    let resolve_one = |name: &str| -> Result<i64, SimError> {
        let ids = doc.areas_named(name);
        match ids.as_slice() {
            [one] => Ok(*one),
            [] => Err(SimError::Case(format!("case references unknown area \"{name}\""))),
            _ => Err(SimError::Case(format!("area name \"{name}\" is ambiguous across levels"))),
        }
    };
    let destination = resolve_one(&spec.destination_name)?;
    let restricted: BTreeSet<i64> = spec
        .restricted_names
        .iter()
        .map(|n| resolve_one(n))
        .collect::<Result<_, _>>()?;

    let world = WorldState::new(spec.closed_doors.iter().copied(), restricted);
    world
        .check_against(&map)
        .map_err(|p| SimError::Case(format!("world references unknown passage {p}")))?;

    let level = doc
        .area(destination)
        .map(|a| a.level)
        .ok_or_else(|| SimError::Case("destination vanished".into()))?;

    Ok(PreparedCase { spec, doc, map, table, graph, world, destination, level })
}

fn trial_pose(case: &PreparedCase, trial: &super::case::TrialStart) -> Result<RobotPose, SimError> {
    let ids = case.doc.areas_named(&trial.area_name);
    let area = *ids
        .first()
        .ok_or_else(|| SimError::Case(format!("trial start area \"{}\" not found", trial.area_name)))?;
    let level = case.doc.area(area).map(|a| a.level).unwrap_or(0);
    let position = LocalPoint::new(trial.x, trial.y);
    let projected = case
        .map
        .area(area)
        .ok_or_else(|| SimError::Case("start area not projected".into()))?;
    if !projected.contains(position) {
        return Err(SimError::Case(format!(
            "trial start ({}, {}) is outside area \"{}\"",
            trial.x, trial.y, trial.area_name
        )));
    }
    Ok(RobotPose { position, area, level })
}

/// Runs every trial of one configuration. Deterministic for deterministic
/// backends.
pub fn run_configuration(
    case: &PreparedCase,
    config: Configuration,
    backend: &dyn ChatBackend,
) -> Result<Vec<TrialResult>, SimError> {
    let caps = RobotCapabilities::wheeled();
    let planner_config = PlannerConfig::default();
    let mut grids = AreaGrids::new(&case.map, DEFAULT_RESOLUTION);
    let mut ledger = ExperienceLedger::new(); // empty at the start of each case run
    let mut results = Vec::new();

    // the monitor only knows what it ingested
    let mut store = EventStore::new();
    let uses_monitor = matches!(config, Configuration::Full | Configuration::NoEvaluator);
    if uses_monitor {
        for (ts, text) in &case.spec.notifications {
            ingest_notification(backend, text, *ts, &case.doc, &mut store)
                .map_err(|e| SimError::Case(format!("ingest failed: {e}")))?;
        }
    }

    let baseline_ctx = match config {
        Configuration::BaselineClearing | Configuration::BaselineMemory => {
            Some(BaselineContext::new(&case.map, &case.world, case.level, DEFAULT_RESOLUTION)?)
        }
        _ => None,
    };
    let mut memory: BTreeSet<i64> = BTreeSet::new();

    for (trial_no, trial) in case.spec.trials.iter().enumerate() {
        let pose = trial_pose(case, trial)?;
        let label = format!("{}-t{}", case.spec.name, trial_no + 1);

        let result = match config {
            Configuration::BaselineClearing | Configuration::BaselineMemory => {
                if config == Configuration::BaselineClearing {
                    memory.clear();
                }
                baseline_navigate(
                    baseline_ctx.as_ref().expect("built above"),
                    &case.map,
                    &case.world,
                    &mut grids,
                    pose,
                    case.destination,
                    &mut memory,
                    config.label(),
                )?
            }
            Configuration::Full | Configuration::NoMonitor | Configuration::NoEvaluator => {
                let destination = case.destination;
                let doc = &case.doc;
                let map = &case.map;
                let graph = &case.graph;
                let instruction = case.spec.instruction.as_str();
                let now = case.spec.now;
                let store_ref = &store;
                let caps_ref = &caps;
                let pcfg = &planner_config;

                let mut plan_source = |grids: &mut AreaGrids,
                                       stats: &crate::copilot::ExperienceStats,
                                       pose: &RobotPose,
                                       infeasible: &BTreeSet<i64>| {
                    let costs = match config {
                        Configuration::NoEvaluator => PassageCostMap::zero(destination),
                        _ => evaluate_passages(backend, instruction, doc, stats, caps_ref)
                            .map_err(PlanError::Copilot)?,
                    };
                    let mut req = PlanRequest::new(pose.clone(), destination);
                    req.costs = costs;
                    req.infeasible_passages = infeasible.clone();
                    if uses_monitor {
                        plan_with_approval(
                            graph, doc, map, grids, &req, backend, store_ref, now, caps_ref,
                            doc.areas.len().max(1), pcfg,
                        )
                    } else {
                        let tg = build_task_graph(graph, map, grids, &req, pcfg)?;
                        shortest_path(&tg, &req.costs, &req.soft_avoid, pcfg)
                            .map(|p| (p, Vec::new()))
                            .ok_or_else(|| PlanError::NoPath { hard_avoid: vec![] })
                    }
                };

                execute_task(
                    &mut plan_source,
                    &case.world,
                    &mut ledger,
                    map,
                    &mut grids,
                    pose,
                    destination,
                    config.label(),
                    &label,
                )?
            }
        };
        results.push(result);
    }
    Ok(results)
}
