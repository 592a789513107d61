//! osmAG map handling: parse, validate, serialize, project, summarize.

mod model;
mod parse;
pub mod project;
mod serialize;
mod summary;
mod validate;

pub use model::{Area, AreaType, DoorType, GeoNode, LocalPoint, MapDocument, Origin, Passage};
pub use parse::parse_osmag;
pub use project::{project, to_geo, to_local, ProjectedArea, ProjectedMap, ProjectedPassage};
pub use serialize::serialize_osmag;
pub use summary::map_summary;
pub use validate::{validate, Violation};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("XML syntax error: {pos}")]
    Xml { pos: String },
    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: i64 },
    #[error("element {element} missing mandatory tag {tag}")]
    MissingTag { element: i64, tag: &'static str },
    #[error("element {element} has dangling node reference {node}")]
    DanglingNode { element: i64, node: i64 },
    #[error("element {element} has dangling area reference {area}")]
    DanglingArea { element: i64, area: i64 },
    #[error("way {element} has unknown osmAG:type \"{value}\"")]
    UnknownWayType { element: i64, value: String },
    #[error("passage {element} must have exactly 2 nd refs, got {got}")]
    BadSegment { element: i64, got: usize },
    #[error("area {element} extends {meters:.0} m from origin, beyond the projection bound")]
    ExtentExceeded { element: i64, meters: f64 },
    #[error("level {level} not present in the map")]
    UnknownLevel { level: i32 },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
