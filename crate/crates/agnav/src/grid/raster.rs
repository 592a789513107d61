//! Polygon-to-grid rasterization.
//!
//! Interior cells (center inside the ring) become free, every cell the
//! boundary passes through becomes a 1-cell wall, then open passage
//! segments are carved back out of the wall.

use crate::map::{LocalPoint, ProjectedArea};

use super::{Cell, GridError, OccupancyGrid};

/// A wall segment to leave open during rasterization.
#[derive(Debug, Clone, Copy)]
pub struct OpenSegment {
    pub a: LocalPoint,
    pub b: LocalPoint,
}

impl OpenSegment {
    pub fn new(a: LocalPoint, b: LocalPoint) -> Self {
        OpenSegment { a, b }
    }

    fn distance_to(&self, p: LocalPoint) -> f64 {
        point_segment_distance(p, self.a, self.b)
    }
}

pub fn rasterize_area(
    area: &ProjectedArea,
    open_passages: &[OpenSegment],
    resolution: f64,
) -> Result<OccupancyGrid, GridError> {
    let (min, max) = area.bbox();
    let pad = 2.0 * resolution;
    let origin = LocalPoint::new(
        (min.x / resolution).floor() * resolution - pad,
        (min.y / resolution).floor() * resolution - pad,
    );
    let width = (((max.x - origin.x) / resolution).ceil() as usize).saturating_add(2);
    let height = (((max.y - origin.y) / resolution).ceil() as usize).saturating_add(2);
    if width < 3 || height < 3 {
        return Err(GridError::DegeneratePolygon { resolution });
    }

    let mut grid = OccupancyGrid::filled(resolution, origin, width, height, Cell::Occupied);

    // interior pass
    let mut any_interior = false;
    for row in 0..height as i64 {
        for col in 0..width as i64 {
            if area.contains(grid.center_of(col, row)) {
                grid.set(col, row, Cell::Free);
                any_interior = true;
            }
        }
    }
    if !any_interior {
        return Err(GridError::DegeneratePolygon { resolution });
    }

    // wall pass: every cell the ring crosses
    for w in area.ring.windows(2) {
        for (col, row) in supercover_cells(&grid, w[0], w[1]) {
            grid.set(col, row, Cell::Occupied);
        }
    }

    carve_open_segments(&mut grid, open_passages);
    Ok(grid)
}

/// Free every cell whose center lies within one cell of an open segment.
pub(crate) fn carve_open_segments(grid: &mut OccupancyGrid, open: &[OpenSegment]) {
    let res = grid.resolution;
    for seg in open {
        let lo = LocalPoint::new(seg.a.x.min(seg.b.x) - 2.0 * res, seg.a.y.min(seg.b.y) - 2.0 * res);
        let hi = LocalPoint::new(seg.a.x.max(seg.b.x) + 2.0 * res, seg.a.y.max(seg.b.y) + 2.0 * res);
        let (c0, r0) = grid.cell_of(lo);
        let (c1, r1) = grid.cell_of(hi);
        for row in r0.max(0)..=r1.min(grid.height as i64 - 1) {
            for col in c0.max(0)..=c1.min(grid.width as i64 - 1) {
                if seg.distance_to(grid.center_of(col, row)) <= res {
                    grid.set(col, row, Cell::Free);
                }
            }
        }
    }
}

/// All cells a segment passes through (conservative supercover walk).
pub(crate) fn supercover_cells(grid: &OccupancyGrid, a: LocalPoint, b: LocalPoint) -> Vec<(i64, i64)> {
    let res = grid.resolution;
    let len = a.distance(&b);
    let steps = ((len / res) * 4.0).ceil().max(1.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut last = (i64::MIN, i64::MIN);
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let p = LocalPoint::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
        let cell = grid.cell_of(p);
        if cell != last {
            out.push(cell);
            last = cell;
        }
    }
    out
}

fn point_segment_distance(p: LocalPoint, a: LocalPoint, b: LocalPoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(&a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(&LocalPoint::new(a.x + t * dx, a.y + t * dy))
}
