//! move_base-style baseline: plans on a full-floor occupancy grid with
//! every unknown door assumed open, discovers closed doors on contact,
//! and never consults notifications. Obstacle memory optionally persists
//! between trials; clearing it mimics periodic costmap resets.

use std::collections::BTreeSet;

use crate::grid::{octile_length, render_restricted, AreaGrids, Cell, OccupancyGrid, ROBOT_RADIUS};
use crate::grid::{grid_astar, OpenSegment};
use crate::map::{LocalPoint, ProjectedMap};
use crate::planner::{interior_anchor, RobotPose};

use super::executor::{ExecSegment, TrialResult};
use super::world::WorldState;
use super::SimError;

/// Full-floor grids shared by every baseline trial of a case.
pub struct BaselineContext {
    /// What the planner believes before any discovery: all doors open.
    pub base_open: OccupancyGrid,
    /// Physical ground truth: closed doors are walls.
    pub truth: OccupancyGrid,
    level: i32,
}

impl BaselineContext {
    pub fn new(
        map: &ProjectedMap,
        world: &WorldState,
        level: i32,
        resolution: f64,
    ) -> Result<Self, SimError> {
        let areas: Vec<i64> = map
            .areas
            .values()
            .filter(|a| a.level == level)
            .map(|a| a.id)
            .collect();
        let level_passage = |p: &&crate::map::ProjectedPassage| p.level_a == level && p.level_b == level;
        let all_passages: Vec<i64> = map.passages.values().filter(|p| level_passage(&p)).map(|p| p.id).collect();
        let open_passages: Vec<i64> = map
            .passages
            .values()
            .filter(|p| level_passage(&p) && !world.is_closed(p.id))
            .map(|p| p.id)
            .collect();
        let base_open = render_restricted(map, level, &areas, &all_passages, resolution)?.inflate(ROBOT_RADIUS);
        let truth = render_restricted(map, level, &areas, &open_passages, resolution)?.inflate(ROBOT_RADIUS);
        Ok(BaselineContext { base_open, truth, level })
    }

    /// Belief grid for a trial: the open base with remembered closures
    /// stamped back in (inflated like any other obstacle).
    fn belief(&self, map: &ProjectedMap, memory: &BTreeSet<i64>) -> OccupancyGrid {
        let mut grid = self.base_open.clone();
        stamp_closed(&mut grid, map, memory);
        grid
    }
}

fn stamp_closed(grid: &mut OccupancyGrid, map: &ProjectedMap, passages: &BTreeSet<i64>) {
    // 1.5 cells covers every carved doorway cell (and any straddling
    // diagonal hop) while staying inside the wall's own inflation zone,
    // so paths that merely pass the door are untouched
    let reach = 1.5 * grid.resolution;
    for pid in passages {
        let Some(p) = map.passage(*pid) else { continue };
        let seg = OpenSegment::new(p.a, p.b);
        let lo = LocalPoint::new(p.a.x.min(p.b.x) - 2.0 * reach, p.a.y.min(p.b.y) - 2.0 * reach);
        let hi = LocalPoint::new(p.a.x.max(p.b.x) + 2.0 * reach, p.a.y.max(p.b.y) + 2.0 * reach);
        let (c0, r0) = grid.cell_of(lo);
        let (c1, r1) = grid.cell_of(hi);
        for row in r0.max(0)..=r1.min(grid.height as i64 - 1) {
            for col in c0.max(0)..=c1.min(grid.width as i64 - 1) {
                if distance_to_segment(grid.center_of(col, row), &seg) <= reach {
                    grid.set(col, row, Cell::Occupied);
                }
            }
        }
    }
}

fn distance_to_segment(p: LocalPoint, seg: &OpenSegment) -> f64 {
    let (dx, dy) = (seg.b.x - seg.a.x, seg.b.y - seg.a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(&seg.a);
    }
    let t = (((p.x - seg.a.x) * dx + (p.y - seg.a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(&LocalPoint::new(seg.a.x + t * dx, seg.a.y + t * dy))
}

#[allow(clippy::too_many_arguments)]
pub fn baseline_navigate(
    ctx: &BaselineContext,
    map: &ProjectedMap,
    world: &WorldState,
    grids: &mut AreaGrids,
    pose: RobotPose,
    destination: i64,
    memory: &mut BTreeSet<i64>,
    configuration: &str,
) -> Result<TrialResult, SimError> {
    let mut result = TrialResult {
        configuration: configuration.to_string(),
        traveled_length: 0.0,
        restricted_entries: 0,
        replans: 0,
        reached: false,
        trace: Vec::new(),
        executed: Vec::new(),
    };
    let anchor = interior_anchor(map, destination, grids.resolution())
        .map_err(|e| SimError::Case(e.to_string()))?;
    let restricted: Vec<&crate::map::ProjectedArea> = map
        .areas
        .values()
        .filter(|a| a.level == ctx.level && world.is_restricted(a.id))
        .collect();

    let mut belief = ctx.belief(map, memory);
    let res = belief.resolution;
    let mut cur = match belief.snap_free(pose.position, 5) {
        Ok(c) => c,
        Err(_) => return Ok(result),
    };
    // start leg from the true pose to the first cell center
    result.traveled_length += pose.position.distance(&belief.center_of(cur.0, cur.1));
    let mut in_restricted: Option<i64> = restricted
        .iter()
        .find(|a| a.contains(pose.position))
        .map(|a| a.id);
    if in_restricted.is_some() {
        result.restricted_entries += 1;
    }

    let budget = map.passages.len();
    let mut polyline = vec![belief.center_of(cur.0, cur.1)];

    'navigate: loop {
        let goal = match belief.snap_free(anchor, 5) {
            Ok(g) => g,
            Err(_) => break 'navigate,
        };
        let Some(path) = grid_astar(&belief, belief.center_of(cur.0, cur.1), belief.center_of(goal.0, goal.1))
            .ok()
            .flatten()
        else {
            break 'navigate;
        };

        for step in path.cells.windows(2) {
            let next = step[1];
            // a 6 m laser is overkill here: the door is discovered when the
            // robot stands next to a cell that turned out to be wall
            let blocked = ctx.truth.get(next.0, next.1) == Cell::Occupied;
            if blocked {
                match closest_closed_passage(map, world, memory, belief.center_of(next.0, next.1)) {
                    Some(pid) => {
                        memory.insert(pid);
                        stamp_closed(&mut belief, map, &BTreeSet::from([pid]));
                    }
                    None => belief.set(next.0, next.1, Cell::Occupied),
                }
                result.replans += 1;
                if result.replans > budget {
                    break 'navigate;
                }
                continue 'navigate;
            }
            let diagonal = next.0 != cur.0 && next.1 != cur.1;
            result.traveled_length += octile_length(u64::from(!diagonal), u64::from(diagonal), res);
            cur = next;
            let center = belief.center_of(cur.0, cur.1);
            polyline.push(center);
            let now_in = restricted.iter().find(|a| a.contains(center)).map(|a| a.id);
            if now_in.is_some() && now_in != in_restricted {
                result.restricted_entries += 1;
            }
            in_restricted = now_in;
        }

        // end leg to the true anchor
        result.traveled_length += anchor.distance(&belief.center_of(cur.0, cur.1));
        result.reached = true;
        break 'navigate;
    }

    result.executed.push(ExecSegment {
        area: destination,
        from: pose.position,
        to: anchor,
        length: result.traveled_length,
        cells: polyline,
    });
    Ok(result)
}

/// The closed, not yet remembered passage nearest to the contact point.
fn closest_closed_passage(
    map: &ProjectedMap,
    world: &WorldState,
    memory: &BTreeSet<i64>,
    contact: LocalPoint,
) -> Option<i64> {
    let mut best: Option<(f64, i64)> = None;
    for pid in world.closed_passages() {
        if memory.contains(&pid) {
            continue;
        }
        let p = map.passage(pid)?;
        let d = distance_to_segment(contact, &OpenSegment::new(p.a, p.b));
        if best.map_or(true, |(bd, bid)| d < bd || (d == bd && pid < bid)) {
            best = Some((d, pid));
        }
    }
    // the contact must actually be at this door, not across the building
    best.filter(|(d, _)| *d <= ROBOT_RADIUS + 3.0 * map_resolution_hint()).map(|(_, pid)| pid)
}

fn map_resolution_hint() -> f64 {
    crate::grid::DEFAULT_RESOLUTION
}
