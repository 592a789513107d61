//! Restricted global-map rendering: the union of a plan's areas with every
//! passage not on the plan sealed shut, so a grid planner physically cannot
//! leave the approved corridor of areas.

use std::collections::BTreeSet;

use crate::map::{LocalPoint, ProjectedMap};

use super::raster::{carve_open_segments, supercover_cells, OpenSegment};
use super::{Cell, GridError, OccupancyGrid};

pub fn render_restricted(
    map: &ProjectedMap,
    level: i32,
    allowed_areas: &[i64],
    open_passages: &[i64],
    resolution: f64,
) -> Result<OccupancyGrid, GridError> {
    if allowed_areas.is_empty() {
        return Err(GridError::NoAllowedAreas);
    }
    let allowed: BTreeSet<i64> = allowed_areas.iter().copied().collect();
    for id in &allowed {
        let area = map.area(*id).ok_or(GridError::AreaNotOnLevel { area: *id, level })?;
        if area.level != level {
            return Err(GridError::AreaNotOnLevel { area: *id, level });
        }
    }
    for pid in open_passages {
        let p = map.passage(*pid).ok_or(GridError::PassageNotAdjacent { passage: *pid })?;
        if !allowed.contains(&p.area_a) && !allowed.contains(&p.area_b) {
            return Err(GridError::PassageNotAdjacent { passage: *pid });
        }
    }

    // unioned bounding box
    let mut min = LocalPoint::new(f64::INFINITY, f64::INFINITY);
    let mut max = LocalPoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for id in &allowed {
        let (lo, hi) = map.area(*id).expect("checked above").bbox();
        min.x = min.x.min(lo.x);
        min.y = min.y.min(lo.y);
        max.x = max.x.max(hi.x);
        max.y = max.y.max(hi.y);
    }
    let pad = 2.0 * resolution;
    let origin = LocalPoint::new(
        (min.x / resolution).floor() * resolution - pad,
        (min.y / resolution).floor() * resolution - pad,
    );
    let width = (((max.x - origin.x) / resolution).ceil() as usize).saturating_add(2);
    let height = (((max.y - origin.y) / resolution).ceil() as usize).saturating_add(2);

    let mut grid = OccupancyGrid::filled(resolution, origin, width, height, Cell::Occupied);

    // interiors of allowed areas
    let areas: Vec<_> = allowed.iter().map(|id| map.area(*id).expect("checked")).collect();
    for row in 0..height as i64 {
        for col in 0..width as i64 {
            let c = grid.center_of(col, row);
            if areas.iter().any(|a| a.contains(c)) {
                grid.set(col, row, Cell::Free);
            }
        }
    }

    // walls of allowed areas (seals shared walls between two allowed areas too)
    for area in &areas {
        for w in area.ring.windows(2) {
            for (col, row) in supercover_cells(&grid, w[0], w[1]) {
                grid.set(col, row, Cell::Occupied);
            }
        }
    }

    // only the selected passages are carved open
    let segs: Vec<OpenSegment> = open_passages
        .iter()
        .filter_map(|pid| map.passage(*pid))
        .filter(|p| p.level_a == level && p.level_b == level)
        .map(|p| OpenSegment::new(p.a, p.b))
        .collect();
    carve_open_segments(&mut grid, &segs);

    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::grid_astar;
    use crate::map::{parse_osmag, project};

    fn fixture(name: &str) -> ProjectedMap {
        let xml = std::fs::read_to_string(format!(
            "{}/../../fixtures/{name}",
            env!("CARGO_MANIFEST_DIR")
        ))
        .unwrap();
        project(&parse_osmag(&xml).unwrap()).unwrap()
    }

    #[test]
    fn sealed_room_has_no_exit() {
        let map = fixture("campus_floor1.osm");
        // Lobby alone, nothing open
        let grid = render_restricted(&map, 1, &[101], &[], 0.1).unwrap();
        let inside = grid.flood_fill(grid.snap_free(LocalPoint::new(22.0, 9.0), 5).unwrap());
        assert!(!inside.is_empty());
        // no reached cell center may lie outside the lobby
        let lobby = map.area(101).unwrap();
        for (c, r) in inside {
            assert!(lobby.contains(grid.center_of(c, r)));
        }
    }

    #[test]
    fn open_passage_connects_two_areas() {
        let map = fixture("campus_floor1.osm");
        // B102 and Lobby share passage 206
        let grid = render_restricted(&map, 1, &[101, 107], &[206], 0.1).unwrap();
        let path = grid_astar(&grid, LocalPoint::new(15.0, 9.0), LocalPoint::new(24.0, 9.0))
            .unwrap()
            .expect("carved passage should connect the rooms");
        assert!(path.length > 0.0);

        // without the carve the rooms stay sealed
        let sealed = render_restricted(&map, 1, &[101, 107], &[], 0.1).unwrap();
        let none = grid_astar(&sealed, LocalPoint::new(15.0, 9.0), LocalPoint::new(24.0, 9.0)).unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn foreign_open_passage_is_an_error() {
        let map = fixture("campus_floor1.osm");
        // 215 (Corridor E - Lab) touches neither B102 nor Lobby
        let err = render_restricted(&map, 1, &[101, 107], &[215], 0.1);
        assert!(matches!(err, Err(GridError::PassageNotAdjacent { passage: 215 })));
    }
}
