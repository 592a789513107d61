//! Structural validation of a [`MapDocument`]. Violations are data, not
//! errors: callers decide whether to reject, report, or repair.

use std::collections::{BTreeMap, BTreeSet};

use crate::map::model::*;
use crate::map::parse::ring_signed_area;
use crate::map::project::to_local;

/// One broken rule on one element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub element: i64,
    pub message: String,
}

impl Violation {
    fn new(rule: &'static str, element: i64, message: impl Into<String>) -> Self {
        Violation { rule, element, message: message.into() }
    }

    /// Line format used by the CLI report: `RULE\telement_id\tmessage`.
    pub fn report_line(&self) -> String {
        format!("{}\t{}\t{}", self.rule, self.element, self.message)
    }
}

pub fn validate(doc: &MapDocument) -> Vec<Violation> {
    let mut out = Vec::new();

    for node in doc.nodes.values() {
        if !(-90.0..=90.0).contains(&node.lat) || !(-180.0..=180.0).contains(&node.lon) {
            out.push(Violation::new(
                "node-coordinate-range",
                node.id,
                format!("lat/lon ({}, {}) outside valid ranges", node.lat, node.lon),
            ));
        }
    }

    let mut names_per_level: BTreeMap<(i32, &str), Vec<i64>> = BTreeMap::new();
    for area in doc.areas.values() {
        validate_area(doc, area, &mut out);
        names_per_level.entry((area.level, area.name.as_str())).or_default().push(area.id);
    }
    for ((level, name), ids) in names_per_level {
        if ids.len() > 1 {
            for id in &ids {
                out.push(Violation::new(
                    "name-unique-per-level",
                    *id,
                    format!("name \"{name}\" used by {} areas on level {level}", ids.len()),
                ));
            }
        }
    }

    validate_parent_forest(doc, &mut out);

    for p in doc.passages.values() {
        validate_passage(doc, p, &mut out);
    }

    out.sort_by(|a, b| (a.element, a.rule).cmp(&(b.element, b.rule)));
    out
}

fn validate_area(doc: &MapDocument, area: &Area, out: &mut Vec<Violation>) {
    if area.name.is_empty() {
        out.push(Violation::new("name-nonempty", area.id, "area has an empty name"));
    }

    let ring = &area.polygon;
    if ring.len() < 4 || ring.first() != ring.last() {
        out.push(Violation::new(
            "polygon-closed",
            area.id,
            format!("polygon must be a closed ring of >= 4 entries, got {} (first {:?}, last {:?})",
                ring.len(), ring.first(), ring.last()),
        ));
        return; // geometry checks need a ring
    }

    let mut missing = false;
    for nd in ring {
        if !doc.nodes.contains_key(nd) {
            out.push(Violation::new("dangling-node-ref", area.id, format!("polygon references missing node {nd}")));
            missing = true;
        }
    }
    if missing {
        return;
    }

    if ring_signed_area(doc, ring) <= 0.0 {
        out.push(Violation::new("polygon-ccw-positive", area.id, "polygon signed area is not strictly positive"));
    }

    if !ring_is_simple(doc, ring) {
        out.push(Violation::new("polygon-simple", area.id, "polygon edges self-intersect"));
    }
}

fn validate_parent_forest(doc: &MapDocument, out: &mut Vec<Violation>) {
    for area in doc.areas.values() {
        if let Some(parent) = area.parent {
            if !doc.areas.contains_key(&parent) {
                out.push(Violation::new("parent-forest", area.id, format!("parent {parent} does not exist")));
                continue;
            }
            // walk up; a repeat of the starting id is a cycle
            let mut seen = BTreeSet::from([area.id]);
            let mut cur = parent;
            loop {
                if !seen.insert(cur) {
                    out.push(Violation::new("parent-forest", area.id, format!("parent chain cycles through {cur}")));
                    break;
                }
                match doc.areas.get(&cur).and_then(|a| a.parent) {
                    Some(next) => cur = next,
                    None => break,
                }
            }
        }
    }
}

fn validate_passage(doc: &MapDocument, p: &Passage, out: &mut Vec<Violation>) {
    if p.segment[0] == p.segment[1] {
        out.push(Violation::new("passage-segment-distinct", p.id, "segment nodes must be two distinct node ids"));
    }
    for nd in &p.segment {
        if !doc.nodes.contains_key(nd) {
            out.push(Violation::new("dangling-node-ref", p.id, format!("segment references missing node {nd}")));
            return;
        }
    }
    if p.area_a == p.area_b {
        out.push(Violation::new("passage-distinct-areas", p.id, "passage must join two different areas"));
    }

    let mut areas_ok = true;
    for aid in [p.area_a, p.area_b] {
        match doc.areas.get(&aid) {
            None => {
                out.push(Violation::new("dangling-area-ref", p.id, format!("adjacent area {aid} does not exist")));
                areas_ok = false;
            }
            Some(area) => {
                if !p.segment.iter().all(|nd| area.polygon.contains(nd)) {
                    out.push(Violation::new(
                        "passage-on-shared-wall",
                        p.id,
                        format!("segment nodes are not on the boundary of area {} ({})", aid, area.name),
                    ));
                }
            }
        }
    }

    if areas_ok && p.level_a != p.level_b {
        let vertical = p.door_type == DoorType::ElevatorDoor
            || [p.area_a, p.area_b].iter().any(|aid| {
                matches!(doc.areas[aid].area_type, AreaType::Elevator | AreaType::Stairs)
            });
        if !vertical {
            out.push(Violation::new(
                "passage-level-consistent",
                p.id,
                format!("levels {} and {} differ on a non-vertical passage", p.level_a, p.level_b),
            ));
        }
    }
}

/// Segment-pair intersection test over the projected ring; shared ring
/// vertices between neighboring edges do not count.
fn ring_is_simple(doc: &MapDocument, ring: &[i64]) -> bool {
    let pts: Vec<LocalPoint> = ring
        .iter()
        .map(|id| {
            let n = &doc.nodes[id];
            to_local(doc.origin, n.lat, n.lon)
        })
        .collect();
    let n = pts.len() - 1; // edges
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                return false;
            }
        }
    }
    true
}

fn segments_intersect(a: LocalPoint, b: LocalPoint, c: LocalPoint, d: LocalPoint) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    // collinear overlap counts as self-intersection too
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

fn cross(o: LocalPoint, a: LocalPoint, b: LocalPoint) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn on_segment(a: LocalPoint, b: LocalPoint, p: LocalPoint) -> bool {
    p.x >= a.x.min(b.x) - 1e-12
        && p.x <= a.x.max(b.x) + 1e-12
        && p.y >= a.y.min(b.y) - 1e-12
        && p.y <= a.y.max(b.y) + 1e-12
}
