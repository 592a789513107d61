//! Local equirectangular projection about the document origin.
//!
//! `x = R * cos(lat0) * dlon`, `y = R * dlat` (radians, R = 6371000 m).
//! At building scale (< 2 km) the distortion is far below grid resolution
//! and the inverse is exact to ~1e-9 degrees.

use std::collections::BTreeMap;

use crate::map::model::*;
use crate::map::MapError;

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Hard ceiling on map extent; beyond this the flat-earth error grows
/// past what the planner tolerances assume.
pub const MAX_EXTENT_M: f64 = 10_000.0;

pub fn to_local(origin: Origin, lat: f64, lon: f64) -> LocalPoint {
    let x = EARTH_RADIUS_M * origin.lat.to_radians().cos() * (lon - origin.lon).to_radians();
    let y = EARTH_RADIUS_M * (lat - origin.lat).to_radians();
    LocalPoint::new(x, y)
}

pub fn to_geo(origin: Origin, p: LocalPoint) -> (f64, f64) {
    let lat = origin.lat + (p.y / EARTH_RADIUS_M).to_degrees();
    let lon = origin.lon + (p.x / (EARTH_RADIUS_M * origin.lat.to_radians().cos())).to_degrees();
    (lat, lon)
}

/// An area with its ring projected to local meters.
#[derive(Debug, Clone)]
pub struct ProjectedArea {
    pub id: i64,
    pub name: String,
    pub area_type: AreaType,
    pub level: i32,
    /// Closed CCW ring (first point repeated last).
    pub ring: Vec<LocalPoint>,
}

impl ProjectedArea {
    /// Point-in-polygon by ray casting; boundary points are unspecified.
    pub fn contains(&self, p: LocalPoint) -> bool {
        point_in_ring(&self.ring, p)
    }

    /// Arithmetic centroid of the ring (may fall outside concave rings).
    pub fn centroid(&self) -> LocalPoint {
        let n = self.ring.len() - 1;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for p in &self.ring[..n] {
            cx += p.x;
            cy += p.y;
        }
        LocalPoint::new(cx / n as f64, cy / n as f64)
    }

    pub fn bbox(&self) -> (LocalPoint, LocalPoint) {
        let mut min = LocalPoint::new(f64::INFINITY, f64::INFINITY);
        let mut max = LocalPoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.ring {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        (min, max)
    }
}

/// A passage with its wall segment projected to local meters.
#[derive(Debug, Clone)]
pub struct ProjectedPassage {
    pub id: i64,
    pub area_a: i64,
    pub area_b: i64,
    pub door_type: DoorType,
    pub level_a: i32,
    pub level_b: i32,
    pub a: LocalPoint,
    pub b: LocalPoint,
}

impl ProjectedPassage {
    pub fn midpoint(&self) -> LocalPoint {
        LocalPoint::new((self.a.x + self.b.x) / 2.0, (self.a.y + self.b.y) / 2.0)
    }

    pub fn borders(&self, area_id: i64) -> bool {
        self.area_a == area_id || self.area_b == area_id
    }

    pub fn other_area(&self, area_id: i64) -> Option<i64> {
        if self.area_a == area_id {
            Some(self.area_b)
        } else if self.area_b == area_id {
            Some(self.area_a)
        } else {
            None
        }
    }
}

/// The metric view of a [`MapDocument`].
#[derive(Debug, Clone)]
pub struct ProjectedMap {
    pub origin: Origin,
    pub areas: BTreeMap<i64, ProjectedArea>,
    pub passages: BTreeMap<i64, ProjectedPassage>,
}

impl ProjectedMap {
    pub fn area(&self, id: i64) -> Option<&ProjectedArea> {
        self.areas.get(&id)
    }

    pub fn passage(&self, id: i64) -> Option<&ProjectedPassage> {
        self.passages.get(&id)
    }

    /// Passages bordering `area_id`, sorted by id.
    pub fn passages_of_area(&self, area_id: i64) -> Vec<&ProjectedPassage> {
        self.passages.values().filter(|p| p.borders(area_id)).collect()
    }

    /// The area (on the given level, if any) containing the point.
    pub fn area_containing(&self, p: LocalPoint, level: Option<i32>) -> Option<&ProjectedArea> {
        self.areas
            .values()
            .filter(|a| level.map_or(true, |l| a.level == l))
            .find(|a| a.contains(p))
    }
}

pub fn project(doc: &MapDocument) -> Result<ProjectedMap, MapError> {
    let mut areas = BTreeMap::new();
    for area in doc.areas.values() {
        let ring: Vec<LocalPoint> = area
            .polygon
            .iter()
            .map(|id| {
                let n = &doc.nodes[id];
                to_local(doc.origin, n.lat, n.lon)
            })
            .collect();
        for p in &ring {
            let r = p.x.hypot(p.y);
            if r > MAX_EXTENT_M {
                return Err(MapError::ExtentExceeded { element: area.id, meters: r });
            }
        }
        areas.insert(
            area.id,
            ProjectedArea {
                id: area.id,
                name: area.name.clone(),
                area_type: area.area_type,
                level: area.level,
                ring,
            },
        );
    }
    let mut passages = BTreeMap::new();
    for p in doc.passages.values() {
        let na = &doc.nodes[&p.segment[0]];
        let nb = &doc.nodes[&p.segment[1]];
        passages.insert(
            p.id,
            ProjectedPassage {
                id: p.id,
                area_a: p.area_a,
                area_b: p.area_b,
                door_type: p.door_type,
                level_a: p.level_a,
                level_b: p.level_b,
                a: to_local(doc.origin, na.lat, na.lon),
                b: to_local(doc.origin, nb.lat, nb.lon),
            },
        );
    }
    Ok(ProjectedMap { origin: doc.origin, areas, passages })
}

pub(crate) fn point_in_ring(ring: &[LocalPoint], p: LocalPoint) -> bool {
    // ray cast to +x; ring is closed (first == last)
    let mut inside = false;
    for w in ring.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (a.y > p.y) != (b.y > p.y) {
            let t = (p.y - a.y) / (b.y - a.y);
            let x = a.x + t * (b.x - a.x);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    inside
}
