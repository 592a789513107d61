//! Path planning over the passage graph: task-graph surgery, weighted
//! shortest path, and the monitor approval loop.

mod approval;
mod search;
mod task_graph;

pub use approval::{plan_with_approval, ApprovalRound};
pub use search::{shortest_path, PathPlan};
pub use task_graph::{build_task_graph, interior_anchor, TaskGraph};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::copilot::PassageCostMap;
use crate::map::LocalPoint;

/// Default surcharge added to every edge through a soft-avoided area.
pub const DEFAULT_W_SOFT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    /// Euclidean-to-anchor lowered by the grid quantization slack.
    Euclidean,
    /// Plain Dijkstra.
    None,
}

/// Search knobs. The defaults follow the shipped configuration; the
/// edge-only avoidance reading is kept behind a flag for comparison.
#[derive(Debug, Clone)]
pub struct PlannerConfig {
    pub w_soft: f64,
    pub heuristic: Heuristic,
    /// When true, hard avoidance only removes edges through avoided areas,
    /// leaving their boundary passages usable as through-vertices.
    pub hard_avoid_edges_only: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig { w_soft: DEFAULT_W_SOFT, heuristic: Heuristic::Euclidean, hard_avoid_edges_only: false }
    }
}

/// Where the robot currently is.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotPose {
    pub position: LocalPoint,
    pub area: i64,
    pub level: i32,
}

/// Everything a single planning query needs.
#[derive(Debug, Clone)]
pub struct PlanRequest {
    pub pose: RobotPose,
    pub destination: i64,
    pub costs: PassageCostMap,
    pub hard_avoid: BTreeSet<i64>,
    pub soft_avoid: BTreeSet<i64>,
    /// Passages found impassable earlier in the same task.
    pub infeasible_passages: BTreeSet<i64>,
}

impl PlanRequest {
    pub fn new(pose: RobotPose, destination: i64) -> Self {
        PlanRequest {
            pose,
            destination,
            costs: PassageCostMap::zero(destination),
            hard_avoid: BTreeSet::new(),
            soft_avoid: BTreeSet::new(),
            infeasible_passages: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("start area {area} is hard-avoided")]
    StartAreaAvoided { area: i64 },
    #[error("destination area {area} has no remaining passages")]
    DestinationSealed { area: i64 },
    #[error("area {area} does not exist")]
    UnknownArea { area: i64 },
    #[error("no path after exclusions; avoided areas: {hard_avoid:?}")]
    NoPath { hard_avoid: Vec<i64> },
    #[error("approval loop exhausted after {rounds} rounds")]
    RoundsExhausted { rounds: usize },
    #[error("grid: {0}")]
    Grid(#[from] crate::grid::GridError),
    #[error("copilot: {0}")]
    Copilot(#[from] crate::copilot::CopilotError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copilot::PassageCostMap;
    use crate::graph::{build_area_graph, precompute_distances};
    use crate::grid::AreaGrids;
    use crate::map::{parse_osmag, project, MapDocument, ProjectedMap};

    fn load(name: &str) -> (MapDocument, ProjectedMap) {
        let xml = std::fs::read_to_string(format!(
            "{}/../../fixtures/{name}",
            env!("CARGO_MANIFEST_DIR")
        ))
        .unwrap();
        let doc = parse_osmag(&xml).unwrap();
        let map = project(&doc).unwrap();
        (doc, map)
    }

    // two_routes.osm: Start Bay (101) -> Goal Bay (106) via the North Run
    // (102, automatic door 201) or the three-leg south detour (103/104/105,
    // handle door 203)
    fn two_routes_setup() -> (MapDocument, ProjectedMap, crate::graph::IntraAreaDistanceTable) {
        let (doc, map) = load("two_routes.osm");
        let table = precompute_distances(&map, 0.1).unwrap();
        (doc, map, table)
    }

    fn pose_in_start() -> RobotPose {
        RobotPose { position: LocalPoint::new(1.0, 5.0), area: 101, level: 1 }
    }

    #[test]
    fn equal_lengths_choose_the_cheaper_door() {
        let (_doc, map, table) = two_routes_setup();
        let graph = build_area_graph(&map, &table).unwrap();
        let mut grids = AreaGrids::new(&map, 0.1);
        let config = PlannerConfig::default();

        let mut req = PlanRequest::new(pose_in_start(), 106);
        // rule-backend style costs: handle door 203 costs 5
        req.costs.costs.insert(203, 5.0);
        let tg = build_task_graph(&graph, &map, &mut grids, &req, &config).unwrap();
        let plan = shortest_path(&tg, &req.costs, &req.soft_avoid, &config).unwrap();
        assert_eq!(plan.passages, vec![201, 202], "north route through the automatic door");
        assert_eq!(plan.areas, vec![101, 102, 106]);
        assert!(plan.est_cost >= plan.est_length);
        assert_eq!(plan.est_cost, plan.est_length); // no pc on the chosen route
    }

    #[test]
    fn soft_avoid_switches_routes_only_above_the_gap() {
        let (_doc, map, table) = two_routes_setup();
        let graph = build_area_graph(&map, &table).unwrap();
        let mut grids = AreaGrids::new(&map, 0.1);
        let mut req = PlanRequest::new(pose_in_start(), 106);
        req.soft_avoid.insert(102); // penalize the North Run

        // measure the two pure lengths first
        let config = PlannerConfig { w_soft: 0.0, ..PlannerConfig::default() };
        let tg = build_task_graph(&graph, &map, &mut grids, &req, &config).unwrap();
        let north = shortest_path(&tg, &req.costs, &req.soft_avoid, &config).unwrap();
        assert_eq!(north.passages, vec![201, 202]);

        let mut hard_south = req.clone();
        hard_south.hard_avoid.insert(102);
        let tg2 = build_task_graph(&graph, &map, &mut grids, &hard_south, &config).unwrap();
        let south = shortest_path(&tg2, &hard_south.costs, &hard_south.soft_avoid, &config).unwrap();
        assert_eq!(south.passages, vec![203, 204, 205, 206]);
        let gap = south.est_length - north.est_length;
        assert!(gap > 0.0);

        // a surcharge below the gap keeps the north route
        let low = PlannerConfig { w_soft: gap - 0.5, ..PlannerConfig::default() };
        let tg3 = build_task_graph(&graph, &map, &mut grids, &req, &low).unwrap();
        let plan = shortest_path(&tg3, &req.costs, &req.soft_avoid, &low).unwrap();
        assert_eq!(plan.passages, vec![201, 202]);

        // above the gap the plan detours south
        let high = PlannerConfig { w_soft: gap + 0.5, ..PlannerConfig::default() };
        let plan = shortest_path(&tg3, &req.costs, &req.soft_avoid, &high).unwrap();
        assert_eq!(plan.passages, vec![203, 204, 205, 206]);
    }

    #[test]
    fn hard_avoid_disconnects_a_chain() {
        let (_doc, map, table) = two_routes_setup();
        let graph = build_area_graph(&map, &table).unwrap();
        let mut grids = AreaGrids::new(&map, 0.1);
        let config = PlannerConfig::default();
        let mut req = PlanRequest::new(pose_in_start(), 106);
        req.hard_avoid.insert(102); // no north
        req.hard_avoid.insert(104); // no south run either
        let tg = build_task_graph(&graph, &map, &mut grids, &req, &config).unwrap();
        assert!(shortest_path(&tg, &req.costs, &req.soft_avoid, &config).is_none());
    }

    #[test]
    fn same_area_task_takes_the_direct_edge() {
        let (_doc, map, table) = two_routes_setup();
        let graph = build_area_graph(&map, &table).unwrap();
        let mut grids = AreaGrids::new(&map, 0.1);
        let config = PlannerConfig::default();
        let req = PlanRequest::new(pose_in_start(), 101);
        let tg = build_task_graph(&graph, &map, &mut grids, &req, &config).unwrap();
        let plan = shortest_path(&tg, &req.costs, &req.soft_avoid, &config).unwrap();
        assert!(plan.passages.is_empty());
        assert_eq!(plan.areas, vec![101]);
        assert!(plan.est_length > 0.0);
    }

    #[test]
    fn dijkstra_and_astar_agree() {
        let (_doc, map, table) = load_loops();
        let graph = build_area_graph(&map, &table).unwrap();
        let mut grids = AreaGrids::new(&map, 0.1);
        let req = PlanRequest::new(
            RobotPose { position: LocalPoint::new(-3.0, 4.0), area: 106, level: 1 },
            107,
        );
        let a = PlannerConfig { heuristic: Heuristic::Euclidean, ..PlannerConfig::default() };
        let d = PlannerConfig { heuristic: Heuristic::None, ..PlannerConfig::default() };
        let tg = build_task_graph(&graph, &map, &mut grids, &req, &a).unwrap();
        let pa = shortest_path(&tg, &req.costs, &req.soft_avoid, &a).unwrap();
        let pd = shortest_path(&tg, &req.costs, &req.soft_avoid, &d).unwrap();
        assert_eq!(pa.est_cost, pd.est_cost);
        assert_eq!(pa.passages, pd.passages);
    }

    fn load_loops() -> (MapDocument, ProjectedMap, crate::graph::IntraAreaDistanceTable) {
        let (doc, map) = load("loops.osm");
        let table = precompute_distances(&map, 0.1).unwrap();
        (doc, map, table)
    }

    #[test]
    fn zero_costs_mean_cost_equals_length() {
        let (_doc, map, table) = load_loops();
        let graph = build_area_graph(&map, &table).unwrap();
        let mut grids = AreaGrids::new(&map, 0.1);
        let config = PlannerConfig::default();
        let req = PlanRequest::new(
            RobotPose { position: LocalPoint::new(-3.0, 4.0), area: 106, level: 1 },
            108,
        );
        let tg = build_task_graph(&graph, &map, &mut grids, &req, &config).unwrap();
        let plan = shortest_path(&tg, &PassageCostMap::zero(108), &req.soft_avoid, &config).unwrap();
        assert_eq!(plan.est_cost, plan.est_length);
    }
}
