//! Core osmAG document model: nodes, polygon areas, and passages.

use std::collections::BTreeMap;

/// Raw OSM node: an id with WGS84 coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoNode {
    pub id: i64,
    pub lat: f64,
    pub lon: f64,
    /// Tags not consumed by the model, preserved for round-tripping.
    pub extra_tags: BTreeMap<String, String>,
}

/// Functional classification of an area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AreaType {
    Room,
    Corridor,
    Lobby,
    Elevator,
    Stairs,
}

impl AreaType {
    pub fn as_str(&self) -> &'static str {
        match self {
            AreaType::Room => "room",
            AreaType::Corridor => "corridor",
            AreaType::Lobby => "lobby",
            AreaType::Elevator => "elevator",
            AreaType::Stairs => "stairs",
        }
    }

    /// Capitalized label used in summaries.
    pub fn label(&self) -> &'static str {
        match self {
            AreaType::Room => "Room",
            AreaType::Corridor => "Corridor",
            AreaType::Lobby => "Lobby",
            AreaType::Elevator => "Elevator",
            AreaType::Stairs => "Stairs",
        }
    }

    pub fn parse(s: &str) -> Option<AreaType> {
        match s {
            "room" => Some(AreaType::Room),
            "corridor" => Some(AreaType::Corridor),
            "lobby" => Some(AreaType::Lobby),
            "elevator" => Some(AreaType::Elevator),
            "stairs" => Some(AreaType::Stairs),
            _ => None,
        }
    }
}

/// Kind of door occupying a passage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DoorType {
    /// Permanently open gap, no door leaf.
    Open,
    Automatic,
    Handle,
    /// Elevator cabin door; also marks vertical shaft links.
    ElevatorDoor,
}

impl DoorType {
    pub fn as_str(&self) -> &'static str {
        match self {
            DoorType::Open => "open",
            DoorType::Automatic => "automatic",
            DoorType::Handle => "handle",
            DoorType::ElevatorDoor => "elevator_door",
        }
    }

    /// Phrase used in map summaries ("via handle door").
    pub fn phrase(&self) -> &'static str {
        match self {
            DoorType::Open => "open passage",
            DoorType::Automatic => "automatic door",
            DoorType::Handle => "handle door",
            DoorType::ElevatorDoor => "elevator door",
        }
    }

    pub fn parse(s: &str) -> Option<DoorType> {
        match s {
            "open" => Some(DoorType::Open),
            "automatic" => Some(DoorType::Automatic),
            "handle" => Some(DoorType::Handle),
            "elevator_door" => Some(DoorType::ElevatorDoor),
            _ => None,
        }
    }
}

/// A polygonal space (room, corridor, ...) on one floor.
///
/// The polygon is a closed ring of node ids: first id equals last id,
/// orientation is normalized to counter-clockwise at parse time.
#[derive(Debug, Clone, PartialEq)]
pub struct Area {
    pub id: i64,
    pub name: String,
    pub area_type: AreaType,
    pub level: i32,
    pub parent: Option<i64>,
    pub polygon: Vec<i64>,
    pub extra_tags: BTreeMap<String, String>,
}

/// A door segment on the shared wall of two areas; the planning graph vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Passage {
    pub id: i64,
    pub area_a: i64,
    pub area_b: i64,
    pub segment: [i64; 2],
    pub door_type: DoorType,
    pub level_a: i32,
    pub level_b: i32,
    pub extra_tags: BTreeMap<String, String>,
}

impl Passage {
    pub fn borders(&self, area_id: i64) -> bool {
        self.area_a == area_id || self.area_b == area_id
    }

    /// The area on the other side, if `area_id` is one of the two.
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

/// Reference point the local metric projection is anchored to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Origin {
    pub lat: f64,
    pub lon: f64,
}

/// A parsed osmAG document.
#[derive(Debug, Clone, PartialEq)]
pub struct MapDocument {
    pub nodes: BTreeMap<i64, GeoNode>,
    pub areas: BTreeMap<i64, Area>,
    pub passages: BTreeMap<i64, Passage>,
    pub origin: Origin,
}

impl MapDocument {
    pub fn node(&self, id: i64) -> Option<&GeoNode> {
        self.nodes.get(&id)
    }

    pub fn area(&self, id: i64) -> Option<&Area> {
        self.areas.get(&id)
    }

    pub fn passage(&self, id: i64) -> Option<&Passage> {
        self.passages.get(&id)
    }

    /// Areas of one floor, sorted by name.
    pub fn areas_on_level(&self, level: i32) -> Vec<&Area> {
        let mut v: Vec<&Area> = self.areas.values().filter(|a| a.level == level).collect();
        v.sort_by(|a, b| a.name.cmp(&b.name));
        v
    }

    /// All distinct levels present, ascending.
    pub fn levels(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.areas.values().map(|a| a.level).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Passage ids bordering the given area, ascending.
    pub fn passages_of_area(&self, area_id: i64) -> Vec<i64> {
        self.passages
            .values()
            .filter(|p| p.borders(area_id))
            .map(|p| p.id)
            .collect()
    }

    /// Area ids for a human-given name (names are unique per level, so a
    /// name may resolve to one area per floor, e.g. an elevator shaft).
    pub fn areas_named(&self, name: &str) -> Vec<i64> {
        self.areas
            .values()
            .filter(|a| a.name == name)
            .map(|a| a.id)
            .collect()
    }
}

/// Point in the local metric frame: meters east/north of the document origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalPoint {
    pub x: f64,
    pub y: f64,
}

impl LocalPoint {
    pub fn new(x: f64, y: f64) -> Self {
        LocalPoint { x, y }
    }

    pub fn distance(&self, other: &LocalPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}
