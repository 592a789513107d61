//! Per-task graph surgery: drop hard-avoided regions and infeasible
//! passages from the base graph, then splice in a virtual start vertex at
//! the robot pose and a virtual destination vertex at the goal area's
//! interior anchor.

use std::collections::{BTreeMap, BTreeSet};

use crate::grid::{rasterize_area, AreaGrids, Cell};
use crate::graph::AreaGraph;
use crate::map::{LocalPoint, ProjectedMap};

use super::{PlanError, PlanRequest, PlannerConfig};

/// The task-specific search graph.
pub struct TaskGraph<'a> {
    pub base: &'a AreaGraph,
    pub start_area: i64,
    pub dest_area: i64,
    pub start_point: LocalPoint,
    pub dest_anchor: LocalPoint,
    /// Virtual edges v_s -> passage (grid distance within the start area).
    pub start_edges: Vec<(i64, f64)>,
    /// Virtual edges passage -> v_d (grid distance within the goal area).
    pub dest_edges: Vec<(i64, f64)>,
    /// Direct v_s -> v_d edge when start and destination share the area.
    pub direct: Option<f64>,
    /// Passage vertices excluded from this task.
    pub removed_passages: BTreeSet<i64>,
    /// Areas no edge may route through.
    pub removed_areas: BTreeSet<i64>,
    pub midpoints: BTreeMap<i64, LocalPoint>,
    pub resolution: f64,
}

/// A point inside the area suited as a goal anchor: the centroid when it
/// falls inside the polygon, otherwise the interior cell farthest from any
/// wall (deterministic tie-break on scan order).
pub fn interior_anchor(map: &ProjectedMap, area_id: i64, resolution: f64) -> Result<LocalPoint, PlanError> {
    let area = map
        .area(area_id)
        .ok_or(PlanError::UnknownArea { area: area_id })?;
    let centroid = area.centroid();
    if area.contains(centroid) {
        return Ok(centroid);
    }
    let grid = rasterize_area(area, &[], resolution)?;
    // multi-source BFS from every occupied cell; last layer is the pole
    let mut dist: Vec<i32> = grid
        .cells()
        .iter()
        .map(|c| if *c == Cell::Occupied { 0 } else { -1 })
        .collect();
    let mut frontier: Vec<(i64, i64)> = Vec::new();
    for row in 0..grid.height as i64 {
        for col in 0..grid.width as i64 {
            if grid.get(col, row) == Cell::Occupied {
                frontier.push((col, row));
            }
        }
    }
    let at = |c: i64, r: i64| r as usize * grid.width + c as usize;
    let mut best = None;
    let mut layer = 0;
    while !frontier.is_empty() {
        layer += 1;
        let mut next = Vec::new();
        for (c, r) in frontier {
            for (dc, dr) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (nc, nr) = (c + dc, r + dr);
                if grid.idx(nc, nr).is_some() && dist[at(nc, nr)] == -1 {
                    dist[at(nc, nr)] = layer;
                    next.push((nc, nr));
                    best = Some((nc, nr));
                }
            }
        }
        frontier = next;
    }
    let (c, r) = best.ok_or(PlanError::UnknownArea { area: area_id })?;
    Ok(grid.center_of(c, r))
}

pub fn build_task_graph<'a>(
    graph: &'a AreaGraph,
    map: &ProjectedMap,
    grids: &mut AreaGrids,
    req: &PlanRequest,
    config: &PlannerConfig,
) -> Result<TaskGraph<'a>, PlanError> {
    if req.hard_avoid.contains(&req.pose.area) {
        return Err(PlanError::StartAreaAvoided { area: req.pose.area });
    }
    if req.hard_avoid.contains(&req.destination) {
        return Err(PlanError::NoPath { hard_avoid: req.hard_avoid.iter().copied().collect() });
    }
    if map.area(req.destination).is_none() {
        return Err(PlanError::UnknownArea { area: req.destination });
    }

    let removed_areas: BTreeSet<i64> = req.hard_avoid.clone();
    let mut removed_passages: BTreeSet<i64> = req.infeasible_passages.clone();
    if !config.hard_avoid_edges_only {
        // entering a passage that borders an avoided area means entering
        // the area itself, so the vertex goes too
        for p in map.passages.values() {
            if removed_areas.contains(&p.area_a) || removed_areas.contains(&p.area_b) {
                removed_passages.insert(p.id);
            }
        }
    }

    let midpoints: BTreeMap<i64, LocalPoint> =
        map.passages.values().map(|p| (p.id, p.midpoint())).collect();

    let resolution = grids.resolution();
    let dest_anchor = interior_anchor(map, req.destination, resolution)?;

    let mut start_edges = Vec::new();
    for p in map.passages_of_area(req.pose.area) {
        if removed_passages.contains(&p.id) || !graph.has_vertex(p.id) {
            continue;
        }
        if let Some(path) = grids.route(req.pose.area, req.pose.position, p.midpoint())? {
            start_edges.push((p.id, path.length));
        }
    }

    let dest_passages = map.passages_of_area(req.destination);
    let mut dest_edges = Vec::new();
    for p in &dest_passages {
        if removed_passages.contains(&p.id) || !graph.has_vertex(p.id) {
            continue;
        }
        if let Some(path) = grids.route(req.destination, p.midpoint(), dest_anchor)? {
            dest_edges.push((p.id, path.length));
        }
    }

    let direct = if req.pose.area == req.destination {
        grids
            .route(req.pose.area, req.pose.position, dest_anchor)?
            .map(|path| path.length)
    } else {
        None
    };

    if dest_edges.is_empty() && direct.is_none() {
        return Err(PlanError::DestinationSealed { area: req.destination });
    }

    Ok(TaskGraph {
        base: graph,
        start_area: req.pose.area,
        dest_area: req.destination,
        start_point: req.pose.position,
        dest_anchor,
        start_edges,
        dest_edges,
        direct,
        removed_passages,
        removed_areas,
        midpoints,
        resolution,
    })
}
