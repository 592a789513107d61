//! Lazily built per-area navigation grids: each area rasterized with all
//! of its passages open and obstacles inflated by the robot radius. The
//! planner prices virtual start/goal legs on these, and the simulator
//! drives on them.

use std::collections::BTreeMap;

use crate::map::{LocalPoint, ProjectedMap};

use super::raster::OpenSegment;
use super::{rasterize_area, GridError, GridPath, OccupancyGrid, ROBOT_RADIUS};

pub struct AreaGrids<'a> {
    map: &'a ProjectedMap,
    resolution: f64,
    grids: BTreeMap<i64, OccupancyGrid>,
}

impl<'a> AreaGrids<'a> {
    pub fn new(map: &'a ProjectedMap, resolution: f64) -> Self {
        AreaGrids { map, resolution, grids: BTreeMap::new() }
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn grid(&mut self, area_id: i64) -> Result<&OccupancyGrid, GridError> {
        if !self.grids.contains_key(&area_id) {
            let area = self
                .map
                .area(area_id)
                .ok_or(GridError::AreaNotOnLevel { area: area_id, level: 0 })?;
            let open: Vec<OpenSegment> = self
                .map
                .passages_of_area(area_id)
                .iter()
                .map(|p| OpenSegment::new(p.a, p.b))
                .collect();
            let grid = rasterize_area(area, &open, self.resolution)?.inflate(ROBOT_RADIUS);
            self.grids.insert(area_id, grid);
        }
        Ok(&self.grids[&area_id])
    }

    /// Anchored in-area route between two points (see [`super::grid_route`]).
    pub fn route(
        &mut self,
        area_id: i64,
        from: LocalPoint,
        to: LocalPoint,
    ) -> Result<Option<GridPath>, GridError> {
        let grid = self.grid(area_id)?;
        super::grid_route(grid, from, to)
    }
}
