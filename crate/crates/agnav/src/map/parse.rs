//! osmAG reader: OSM XML v0.6 skeleton with `osmAG:*` tags.
//!
//! Area ways carry `osmAG:type=area`, `osmAG:areaType`, `name`, `level` and
//! an optional `osmAG:parent`; passage ways carry `osmAG:type=passage`,
//! `osmAG:from`, `osmAG:to`, `osmAG:doorType` and exactly two `<nd>` refs.
//! Unknown tags are kept verbatim so documents round-trip.

use std::collections::BTreeMap;

use crate::map::model::*;
use crate::map::MapError;

const KNOWN_AREA_TAGS: [&str; 5] = ["osmAG:type", "osmAG:areaType", "name", "level", "osmAG:parent"];
const KNOWN_PASSAGE_TAGS: [&str; 5] = ["osmAG:type", "osmAG:from", "osmAG:to", "osmAG:doorType", "level"];

pub fn parse_osmag(xml_text: &str) -> Result<MapDocument, MapError> {
    let doc = roxmltree::Document::parse(xml_text).map_err(|e| MapError::Xml {
        pos: format!("{}", e),
    })?;

    let root = doc.root_element();
    if root.tag_name().name() != "osm" {
        return Err(MapError::Xml {
            pos: format!("root element is <{}>, expected <osm>", root.tag_name().name()),
        });
    }

    let mut nodes: BTreeMap<i64, GeoNode> = BTreeMap::new();
    let mut areas: BTreeMap<i64, Area> = BTreeMap::new();
    let mut passages: BTreeMap<i64, Passage> = BTreeMap::new();
    let mut origin: Option<Origin> = None;

    for child in root.children().filter(|c| c.is_element()) {
        match child.tag_name().name() {
            "node" => {
                let id = attr_i64(&child, "id")?;
                let lat = attr_f64(&child, "lat", id)?;
                let lon = attr_f64(&child, "lon", id)?;
                let mut extra_tags = BTreeMap::new();
                for (k, v) in element_tags(&child) {
                    if k == "osmAG:origin" && v == "yes" {
                        origin = Some(Origin { lat, lon });
                    }
                    extra_tags.insert(k, v);
                }
                if nodes.insert(id, GeoNode { id, lat, lon, extra_tags }).is_some() {
                    return Err(MapError::DuplicateId { kind: "node", id });
                }
            }
            "way" => {
                let id = attr_i64(&child, "id")?;
                let nd_refs: Vec<i64> = child
                    .children()
                    .filter(|c| c.is_element() && c.tag_name().name() == "nd")
                    .map(|nd| {
                        nd.attribute("ref")
                            .ok_or(MapError::MissingTag { element: id, tag: "nd ref" })
                            .and_then(|r| {
                                r.parse::<i64>().map_err(|_| MapError::MissingTag { element: id, tag: "nd ref" })
                            })
                    })
                    .collect::<Result<_, _>>()?;
                let tags: BTreeMap<String, String> = element_tags(&child).collect();

                match tags.get("osmAG:type").map(String::as_str) {
                    Some("area") => {
                        let area = parse_area(id, nd_refs, &tags)?;
                        if areas.insert(id, area).is_some() {
                            return Err(MapError::DuplicateId { kind: "way", id });
                        }
                    }
                    Some("passage") => {
                        let passage = parse_passage(id, nd_refs, &tags)?;
                        if passages.insert(id, passage).is_some() {
                            return Err(MapError::DuplicateId { kind: "way", id });
                        }
                    }
                    Some(other) => {
                        return Err(MapError::UnknownWayType { element: id, value: other.to_string() });
                    }
                    None => {
                        return Err(MapError::MissingTag { element: id, tag: "osmAG:type" });
                    }
                }
            }
            _ => {} // bounds, relations etc. are ignored
        }
    }

    // referential integrity: parse rejects documents it cannot represent
    for area in areas.values() {
        for nd in &area.polygon {
            if !nodes.contains_key(nd) {
                return Err(MapError::DanglingNode { element: area.id, node: *nd });
            }
        }
    }
    for p in passages.values() {
        for nd in &p.segment {
            if !nodes.contains_key(nd) {
                return Err(MapError::DanglingNode { element: p.id, node: *nd });
            }
        }
        for a in [p.area_a, p.area_b] {
            if !areas.contains_key(&a) {
                return Err(MapError::DanglingArea { element: p.id, area: a });
            }
        }
    }

    let origin = origin.unwrap_or_else(|| bbox_center(&nodes));

    let mut doc = MapDocument { nodes, areas, passages, origin };
    normalize_ccw(&mut doc);
    Ok(doc)
}

fn parse_area(id: i64, nd_refs: Vec<i64>, tags: &BTreeMap<String, String>) -> Result<Area, MapError> {
    let name = tags
        .get("name")
        .cloned()
        .ok_or(MapError::MissingTag { element: id, tag: "name" })?;
    let area_type = tags
        .get("osmAG:areaType")
        .and_then(|s| AreaType::parse(s))
        .ok_or(MapError::MissingTag { element: id, tag: "osmAG:areaType" })?;
    let level = tags
        .get("level")
        .and_then(|s| s.parse::<i32>().ok())
        .ok_or(MapError::MissingTag { element: id, tag: "level" })?;
    let parent = match tags.get("osmAG:parent") {
        Some(s) => Some(s.parse::<i64>().map_err(|_| MapError::MissingTag { element: id, tag: "osmAG:parent" })?),
        None => None,
    };
    let extra_tags = tags
        .iter()
        .filter(|(k, _)| !KNOWN_AREA_TAGS.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Ok(Area { id, name, area_type, level, parent, polygon: nd_refs, extra_tags })
}

fn parse_passage(id: i64, nd_refs: Vec<i64>, tags: &BTreeMap<String, String>) -> Result<Passage, MapError> {
    if nd_refs.len() != 2 {
        return Err(MapError::BadSegment { element: id, got: nd_refs.len() });
    }
    let area_a = tags
        .get("osmAG:from")
        .and_then(|s| s.parse::<i64>().ok())
        .ok_or(MapError::MissingTag { element: id, tag: "osmAG:from" })?;
    let area_b = tags
        .get("osmAG:to")
        .and_then(|s| s.parse::<i64>().ok())
        .ok_or(MapError::MissingTag { element: id, tag: "osmAG:to" })?;
    let door_type = tags
        .get("osmAG:doorType")
        .and_then(|s| DoorType::parse(s))
        .ok_or(MapError::MissingTag { element: id, tag: "osmAG:doorType" })?;
    let level_raw = tags
        .get("level")
        .ok_or(MapError::MissingTag { element: id, tag: "level" })?;
    let (level_a, level_b) = parse_levels(level_raw).ok_or(MapError::MissingTag { element: id, tag: "level" })?;
    let extra_tags = tags
        .iter()
        .filter(|(k, _)| !KNOWN_PASSAGE_TAGS.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Ok(Passage {
        id,
        area_a,
        area_b,
        segment: [nd_refs[0], nd_refs[1]],
        door_type,
        level_a,
        level_b,
        extra_tags,
    })
}

/// `"1"` -> (1, 1); `"1;2"` -> (1, 2) for vertical connectors.
fn parse_levels(s: &str) -> Option<(i32, i32)> {
    if let Some((a, b)) = s.split_once(';') {
        Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
    } else {
        let l = s.trim().parse().ok()?;
        Some((l, l))
    }
}

fn element_tags<'a>(node: &'a roxmltree::Node) -> impl Iterator<Item = (String, String)> + 'a {
    node.children()
        .filter(|c| c.is_element() && c.tag_name().name() == "tag")
        .filter_map(|t| {
            let k = t.attribute("k")?;
            let v = t.attribute("v")?;
            Some((k.to_string(), v.to_string()))
        })
}

fn attr_i64(node: &roxmltree::Node, name: &str) -> Result<i64, MapError> {
    node.attribute(name)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| MapError::Xml { pos: format!("element <{}> lacks integer attribute {name}", node.tag_name().name()) })
}

fn attr_f64(node: &roxmltree::Node, name: &str, id: i64) -> Result<f64, MapError> {
    node.attribute(name)
        .and_then(|v| v.parse().ok())
        .ok_or(MapError::MissingTag { element: id, tag: "lat/lon" })
}

fn bbox_center(nodes: &BTreeMap<i64, GeoNode>) -> Origin {
    if nodes.is_empty() {
        return Origin { lat: 0.0, lon: 0.0 };
    }
    let (mut lat_min, mut lat_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lon_min, mut lon_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in nodes.values() {
        lat_min = lat_min.min(n.lat);
        lat_max = lat_max.max(n.lat);
        lon_min = lon_min.min(n.lon);
        lon_max = lon_max.max(n.lon);
    }
    Origin { lat: (lat_min + lat_max) / 2.0, lon: (lon_min + lon_max) / 2.0 }
}

/// Reorient every polygon ring to counter-clockwise (positive signed area
/// in the local frame). The closing duplicate is kept in place.
fn normalize_ccw(doc: &mut MapDocument) {
    let signed: Vec<(i64, f64)> = doc
        .areas
        .values()
        .map(|a| (a.id, ring_signed_area(doc, &a.polygon)))
        .collect();
    for (id, sa) in signed {
        if sa < 0.0 {
            let area = doc.areas.get_mut(&id).expect("area id from same map");
            let n = area.polygon.len();
            if n > 2 {
                // reverse the ring, keeping first == last
                area.polygon[..n - 1].reverse();
                area.polygon[n - 1] = area.polygon[0];
            }
        }
    }
}

/// Shoelace formula over equirectangular-projected ring coordinates.
pub(crate) fn ring_signed_area(doc: &MapDocument, ring: &[i64]) -> f64 {
    let pts: Vec<(f64, f64)> = ring
        .iter()
        .filter_map(|id| doc.nodes.get(id))
        .map(|n| crate::map::project::to_local(doc.origin, n.lat, n.lon))
        .map(|p| (p.x, p.y))
        .collect();
    let mut acc = 0.0;
    for w in pts.windows(2) {
        acc += w[0].0 * w[1].1 - w[1].0 * w[0].1;
    }
    acc / 2.0
}
