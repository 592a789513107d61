//! Occupancy grids: polygon rasterization, 8-connected A*, restricted
//! global-map rendering, and PGM export.

mod astar;
mod cache;
mod pgm;
mod raster;
mod render;

pub use astar::{grid_astar, grid_route, octile_length, GridPath};
pub use cache::AreaGrids;
pub use pgm::export_pgm;
pub use raster::{rasterize_area, OpenSegment};
pub use render::render_restricted;

use crate::map::LocalPoint;
use thiserror::Error;

/// Default cell size for intra-area distance precomputation.
pub const DEFAULT_RESOLUTION: f64 = 0.1;
/// Finer cell size for exported global maps.
pub const EXPORT_RESOLUTION: f64 = 0.05;
/// Inflation radius applied to obstacles before pathfinding.
pub const ROBOT_RADIUS: f64 = 0.2;
/// Start/goal snapping search radius, in cells.
pub const SNAP_CELLS: i64 = 5;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("polygon degenerate at resolution {resolution}: area below one cell")]
    DegeneratePolygon { resolution: f64 },
    #[error("point ({x:.2}, {y:.2}) not snappable to a free cell within {radius} cells")]
    NotSnappable { x: f64, y: f64, radius: i64 },
    #[error("point ({x:.2}, {y:.2}) outside grid bounds")]
    OutOfBounds { x: f64, y: f64 },
    #[error("no allowed areas given for restricted render")]
    NoAllowedAreas,
    #[error("area {area} is not on level {level}")]
    AreaNotOnLevel { area: i64, level: i32 },
    #[error("open passage {passage} is not adjacent to any allowed area")]
    PassageNotAdjacent { passage: i64 },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Cell occupancy. Rendered maps only distinguish free from occupied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Free,
    Occupied,
}

/// Row-major occupancy grid anchored in the local metric frame.
///
/// `origin` is the outer corner of cell (0, 0); cell centers sit at
/// `origin + (col + 0.5, row + 0.5) * resolution`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub resolution: f64,
    pub origin: LocalPoint,
    pub width: usize,
    pub height: usize,
    cells: Vec<Cell>,
}

impl OccupancyGrid {
    pub fn filled(resolution: f64, origin: LocalPoint, width: usize, height: usize, fill: Cell) -> Self {
        assert!(resolution > 0.0 && width >= 1 && height >= 1);
        OccupancyGrid { resolution, origin, width, height, cells: vec![fill; width * height] }
    }

    #[inline]
    pub fn idx(&self, col: i64, row: i64) -> Option<usize> {
        if col < 0 || row < 0 || col as usize >= self.width || row as usize >= self.height {
            None
        } else {
            Some(row as usize * self.width + col as usize)
        }
    }

    #[inline]
    pub fn get(&self, col: i64, row: i64) -> Cell {
        self.idx(col, row).map_or(Cell::Occupied, |i| self.cells[i])
    }

    #[inline]
    pub fn set(&mut self, col: i64, row: i64, cell: Cell) {
        if let Some(i) = self.idx(col, row) {
            self.cells[i] = cell;
        }
    }

    pub fn is_free(&self, col: i64, row: i64) -> bool {
        self.get(col, row) == Cell::Free
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Grid cell whose interior contains the point.
    pub fn cell_of(&self, p: LocalPoint) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.resolution).floor() as i64,
            ((p.y - self.origin.y) / self.resolution).floor() as i64,
        )
    }

    /// Center of a cell in map coordinates.
    pub fn center_of(&self, col: i64, row: i64) -> LocalPoint {
        LocalPoint::new(
            self.origin.x + (col as f64 + 0.5) * self.resolution,
            self.origin.y + (row as f64 + 0.5) * self.resolution,
        )
    }

    pub fn in_bounds(&self, p: LocalPoint) -> bool {
        let (c, r) = self.cell_of(p);
        self.idx(c, r).is_some()
    }

    /// Grow obstacles by `radius` meters (disk stamp); used to keep the
    /// robot footprint off walls before pathfinding.
    pub fn inflate(&self, radius: f64) -> OccupancyGrid {
        let r_cells = (radius / self.resolution).round() as i64;
        if r_cells <= 0 {
            return self.clone();
        }
        let mut offsets = Vec::new();
        for dy in -r_cells..=r_cells {
            for dx in -r_cells..=r_cells {
                if ((dx * dx + dy * dy) as f64).sqrt() <= r_cells as f64 + 1e-9 {
                    offsets.push((dx, dy));
                }
            }
        }
        let mut out = self.clone();
        for row in 0..self.height as i64 {
            for col in 0..self.width as i64 {
                if self.get(col, row) == Cell::Occupied {
                    for (dx, dy) in &offsets {
                        out.set(col + dx, row + dy, Cell::Occupied);
                    }
                }
            }
        }
        out
    }

    /// Nearest free cell to `p` within `max_cells` (squared-distance order,
    /// ties broken by scan order). Errors if `p` is out of bounds or no
    /// free cell is close enough.
    pub fn snap_free(&self, p: LocalPoint, max_cells: i64) -> Result<(i64, i64), GridError> {
        let (c0, r0) = self.cell_of(p);
        if self.idx(c0, r0).is_none() {
            return Err(GridError::OutOfBounds { x: p.x, y: p.y });
        }
        let mut best: Option<(i64, (i64, i64))> = None;
        for dr in -max_cells..=max_cells {
            for dc in -max_cells..=max_cells {
                let (c, r) = (c0 + dc, r0 + dr);
                if self.is_free(c, r) {
                    let d2 = dc * dc + dr * dr;
                    if best.map_or(true, |(bd, _)| d2 < bd) {
                        best = Some((d2, (c, r)));
                    }
                }
            }
        }
        best.map(|(_, cell)| cell)
            .ok_or(GridError::NotSnappable { x: p.x, y: p.y, radius: max_cells })
    }

    /// Connected free region containing `seed`, via 4-neighbors (diagonal
    /// motion cannot cross a 1-cell wall that 4-connectivity respects).
    pub fn flood_fill(&self, seed: (i64, i64)) -> Vec<(i64, i64)> {
        let mut seen = vec![false; self.width * self.height];
        let mut out = Vec::new();
        let Some(i0) = self.idx(seed.0, seed.1) else { return out };
        if self.cells[i0] != Cell::Free {
            return out;
        }
        let mut stack = vec![seed];
        seen[i0] = true;
        while let Some((c, r)) = stack.pop() {
            out.push((c, r));
            for (dc, dr) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (nc, nr) = (c + dc, r + dr);
                if let Some(i) = self.idx(nc, nr) {
                    if !seen[i] && self.cells[i] == Cell::Free {
                        seen[i] = true;
                        stack.push((nc, nr));
                    }
                }
            }
        }
        out
    }
}
