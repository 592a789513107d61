//! 8-connected grid A* with the octile heuristic.
//!
//! Costs are `resolution` per orthogonal step and `sqrt(2) * resolution`
//! per diagonal step. Path lengths are computed from step counts through
//! [`octile_length`] so a found optimum compares bit-exactly against the
//! closed form. Ties in the open list break on heap insertion sequence.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::map::LocalPoint;

use super::{Cell, GridError, OccupancyGrid, SNAP_CELLS};

/// A grid path: 8-connected cell chain plus its metric length.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    pub cells: Vec<(i64, i64)>,
    pub length: f64,
}

/// Metric length of a path with the given step composition.
#[inline]
pub fn octile_length(orthogonal: u64, diagonal: u64, resolution: f64) -> f64 {
    orthogonal as f64 * resolution + diagonal as f64 * (std::f64::consts::SQRT_2 * resolution)
}

/// Octile lower bound between two cells, in the same arithmetic shape as
/// [`octile_length`].
#[inline]
fn octile_heuristic(a: (i64, i64), b: (i64, i64), resolution: f64) -> f64 {
    let dx = (a.0 - b.0).unsigned_abs();
    let dy = (a.1 - b.1).unsigned_abs();
    octile_length(dx.max(dy) - dx.min(dy), dx.min(dy), resolution)
}

struct OpenEntry {
    f: f64,
    seq: u64,
    cell: (i64, i64),
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f && self.seq == other.seq
    }
}
impl Eq for OpenEntry {}
impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OpenEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (f, seq) through BinaryHeap's max order
        other
            .f
            .partial_cmp(&self.f)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Shortest 8-connected path between the free cells nearest to `start`
/// and `goal`. Returns `None` when the two are not connected.
pub fn grid_astar(
    grid: &OccupancyGrid,
    start: LocalPoint,
    goal: LocalPoint,
) -> Result<Option<GridPath>, GridError> {
    let s = grid.snap_free(start, SNAP_CELLS)?;
    let g = grid.snap_free(goal, SNAP_CELLS)?;
    Ok(astar_cells(grid, s, g))
}

/// Like [`grid_astar`] but the reported length anchors at the exact query
/// points: the straight legs between each point and its snapped cell
/// center are added. A straight wall-to-wall crossing then measures the
/// true wall distance instead of the snapped-center distance, and the
/// result can never undershoot the Euclidean distance of the anchors.
pub fn grid_route(
    grid: &OccupancyGrid,
    start: LocalPoint,
    goal: LocalPoint,
) -> Result<Option<GridPath>, GridError> {
    let s = grid.snap_free(start, SNAP_CELLS)?;
    let g = grid.snap_free(goal, SNAP_CELLS)?;
    Ok(astar_cells(grid, s, g).map(|mut path| {
        path.length += start.distance(&grid.center_of(s.0, s.1));
        path.length += goal.distance(&grid.center_of(g.0, g.1));
        path
    }))
}

pub(crate) fn astar_cells(grid: &OccupancyGrid, s: (i64, i64), g: (i64, i64)) -> Option<GridPath> {
    let res = grid.resolution;
    let w = grid.width;
    let at = |c: (i64, i64)| c.1 as usize * w + c.0 as usize;

    if s == g {
        return Some(GridPath { cells: vec![s], length: 0.0 });
    }

    let n = grid.width * grid.height;
    let mut g_cost = vec![f64::INFINITY; n];
    let mut steps: Vec<(u64, u64)> = vec![(0, 0); n]; // (orthogonal, diagonal)
    let mut parent: Vec<u32> = vec![u32::MAX; n];
    let mut closed = vec![false; n];

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    g_cost[at(s)] = 0.0;
    heap.push(OpenEntry { f: octile_heuristic(s, g, res), seq, cell: s });

    const DIRS: [(i64, i64); 8] = [
        (1, 0), (-1, 0), (0, 1), (0, -1),
        (1, 1), (1, -1), (-1, 1), (-1, -1),
    ];

    while let Some(OpenEntry { cell, .. }) = heap.pop() {
        let ci = at(cell);
        if closed[ci] {
            continue;
        }
        closed[ci] = true;
        if cell == g {
            break;
        }
        for (dx, dy) in DIRS {
            let nb = (cell.0 + dx, cell.1 + dy);
            if grid.get(nb.0, nb.1) != Cell::Free {
                continue;
            }
            let diagonal = dx != 0 && dy != 0;
            if diagonal {
                // no corner cutting through an occupied orthogonal neighbor
                if grid.get(cell.0 + dx, cell.1) != Cell::Free || grid.get(cell.0, cell.1 + dy) != Cell::Free {
                    continue;
                }
            }
            let (so, sd) = steps[ci];
            let (no, nd) = if diagonal { (so, sd + 1) } else { (so + 1, sd) };
            let tentative = octile_length(no, nd, res);
            let ni = at(nb);
            if tentative < g_cost[ni] {
                g_cost[ni] = tentative;
                steps[ni] = (no, nd);
                parent[ni] = ci as u32;
                seq += 1;
                heap.push(OpenEntry { f: tentative + octile_heuristic(nb, g, res), seq, cell: nb });
            }
        }
    }

    let gi = at(g);
    if g_cost[gi].is_infinite() {
        return None;
    }
    let mut cells = Vec::new();
    let mut cur = gi;
    loop {
        cells.push(((cur % w) as i64, (cur / w) as i64));
        if cur == at(s) {
            break;
        }
        cur = parent[cur] as usize;
    }
    cells.reverse();
    let (orth, diag) = steps[gi];
    Some(GridPath { cells, length: octile_length(orth, diag, res) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::LocalPoint;

    fn open_grid(w: usize, h: usize, res: f64) -> OccupancyGrid {
        OccupancyGrid::filled(res, LocalPoint::new(0.0, 0.0), w, h, Cell::Free)
    }

    #[test]
    fn start_equals_goal() {
        let g = open_grid(10, 10, 0.1);
        let p = grid_astar(&g, LocalPoint::new(0.55, 0.55), LocalPoint::new(0.55, 0.55))
            .unwrap()
            .unwrap();
        assert_eq!(p.cells.len(), 1);
        assert_eq!(p.length, 0.0);
    }

    #[test]
    fn diagonal_matches_closed_form() {
        // 10 m square at 0.1 m: (1,1) -> (9,9) in meters is 80 cells diagonal
        let g = open_grid(100, 100, 0.1);
        let p = grid_astar(&g, LocalPoint::new(1.0, 1.0), LocalPoint::new(9.0, 9.0))
            .unwrap()
            .unwrap();
        let expected = octile_length(0, 80, 0.1);
        assert_eq!(p.length, expected);
        assert!((p.length - 8.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn unreachable_is_none() {
        let mut g = open_grid(20, 20, 0.1);
        for row in 0..20 {
            g.set(10, row, Cell::Occupied);
        }
        let p = grid_astar(&g, LocalPoint::new(0.15, 0.15), LocalPoint::new(1.85, 1.85)).unwrap();
        assert!(p.is_none());
    }

    #[test]
    fn wall_forces_detour_longer_than_octile() {
        let mut g = open_grid(30, 30, 0.1);
        for row in 0..29 {
            g.set(15, row, Cell::Occupied);
        }
        let p = grid_astar(&g, LocalPoint::new(0.55, 0.55), LocalPoint::new(2.55, 0.55))
            .unwrap()
            .unwrap();
        let free_space = octile_heuristic((5, 5), (25, 5), 0.1);
        assert!(p.length > free_space);
        // every step is between 8-neighbors and stays on free cells
        for w in p.cells.windows(2) {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            assert!(dx.abs() <= 1 && dy.abs() <= 1 && (dx, dy) != (0, 0));
            assert!(g.is_free(w[1].0, w[1].1));
        }
    }

    #[test]
    fn snapping_rejects_far_points() {
        let mut g = open_grid(20, 20, 0.1);
        for row in 0..20 {
            for col in 0..20 {
                g.set(col, row, Cell::Occupied);
            }
        }
        g.set(0, 0, Cell::Free);
        let err = grid_astar(&g, LocalPoint::new(1.85, 1.85), LocalPoint::new(0.05, 0.05));
        assert!(matches!(err, Err(GridError::NotSnappable { .. })));
    }
}
