//! The passage graph AG = (V, E): vertices are passages, edges carry the
//! precomputed intra-area grid distance between two passages of the same
//! area. The distance table is cached to a file keyed by a content hash of
//! the projected geometry, so a stale cache self-invalidates.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::grid::{grid_route, rasterize_area, OpenSegment, GridError, ROBOT_RADIUS};
use crate::map::ProjectedMap;

pub const TABLE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("distance table was computed for map {table_hash}, not {map_hash} (stale cache)")]
    StaleCache { table_hash: String, map_hash: String },
    #[error("unsupported distance table version {got}, reader supports v{TABLE_FORMAT_VERSION}")]
    VersionMismatch { got: String },
    #[error("malformed distance table row {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("grid: {0}")]
    Grid(#[from] GridError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Key of one intra-area distance entry: the unordered passage pair is
/// stored with the smaller id first.
pub type PairKey = (i64, i64, i64); // (area, passage_lo, passage_hi)

/// Precomputed passage-to-passage grid distances within each area.
#[derive(Debug, Clone, PartialEq)]
pub struct IntraAreaDistanceTable {
    pub entries: BTreeMap<PairKey, f64>,
    pub map_hash: String,
    pub resolution: f64,
}

impl IntraAreaDistanceTable {
    pub fn get(&self, area: i64, pi: i64, pj: i64) -> Option<f64> {
        let (lo, hi) = if pi <= pj { (pi, pj) } else { (pj, pi) };
        self.entries.get(&(area, lo, hi)).copied()
    }
}

/// Content hash of the projected geometry plus resolution; anything that
/// moves a wall or a door changes the hash.
pub fn map_content_hash(map: &ProjectedMap, resolution: f64) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "res {resolution:.6}");
    for area in map.areas.values() {
        let _ = write!(text, "area {} {} {}", area.id, area.level, area.area_type.as_str());
        for p in &area.ring {
            let _ = write!(text, " {:.4},{:.4}", p.x, p.y);
        }
        text.push('\n');
    }
    for p in map.passages.values() {
        let _ = writeln!(
            text,
            "passage {} {} {} {} {:.4},{:.4} {:.4},{:.4}",
            p.id, p.area_a, p.area_b, p.door_type.as_str(), p.a.x, p.a.y, p.b.x, p.b.y
        );
    }
    let digest = Sha256::digest(text.as_bytes());
    let mut hex = String::with_capacity(16);
    for b in &digest[..8] {
        let _ = write!(hex, "{b:02x}");
    }
    hex
}

/// Rasterizes each area with all of its passages open and runs grid A*
/// between every passage-midpoint pair. Pairs that cannot reach each other
/// are omitted.
pub fn precompute_distances(map: &ProjectedMap, resolution: f64) -> Result<IntraAreaDistanceTable, GraphError> {
    let mut entries = BTreeMap::new();
    for area in map.areas.values() {
        let passages = map.passages_of_area(area.id);
        if passages.len() < 2 {
            continue;
        }
        let open: Vec<OpenSegment> = passages.iter().map(|p| OpenSegment::new(p.a, p.b)).collect();
        let grid = rasterize_area(area, &open, resolution)?.inflate(ROBOT_RADIUS);
        for (i, pi) in passages.iter().enumerate() {
            for pj in &passages[i + 1..] {
                match grid_route(&grid, pi.midpoint(), pj.midpoint()) {
                    Ok(Some(path)) => {
                        let (lo, hi) = if pi.id <= pj.id { (pi.id, pj.id) } else { (pj.id, pi.id) };
                        entries.insert((area.id, lo, hi), path.length);
                    }
                    Ok(None) => {}          // mutually unreachable: omitted
                    Err(GridError::NotSnappable { .. }) => {} // midpoint walled off
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    Ok(IntraAreaDistanceTable {
        entries,
        map_hash: map_content_hash(map, resolution),
        resolution,
    })
}

/// One edge of the passage graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphEdge {
    pub passage_i: i64,
    pub passage_j: i64,
    pub via_area: i64,
    pub distance: f64,
}

/// AG = (V, E) with a per-vertex adjacency index.
#[derive(Debug, Clone)]
pub struct AreaGraph {
    pub vertices: Vec<i64>,
    pub edges: Vec<GraphEdge>,
    adjacency: BTreeMap<i64, Vec<usize>>,
}

impl AreaGraph {
    pub fn edges_of(&self, passage: i64) -> impl Iterator<Item = &GraphEdge> {
        self.adjacency
            .get(&passage)
            .into_iter()
            .flatten()
            .map(|i| &self.edges[*i])
    }

    pub fn has_vertex(&self, passage: i64) -> bool {
        self.vertices.binary_search(&passage).is_ok()
    }
}

pub fn build_area_graph(map: &ProjectedMap, table: &IntraAreaDistanceTable) -> Result<AreaGraph, GraphError> {
    let map_hash = map_content_hash(map, table.resolution);
    if map_hash != table.map_hash {
        return Err(GraphError::StaleCache { table_hash: table.map_hash.clone(), map_hash });
    }

    let vertices: Vec<i64> = map.passages.keys().copied().collect(); // BTreeMap: sorted
    let mut edges = Vec::with_capacity(table.entries.len());
    for (&(area, pi, pj), &d) in &table.entries {
        edges.push(GraphEdge { passage_i: pi, passage_j: pj, via_area: area, distance: d });
    }
    edges.sort_by(|a, b| {
        (a.passage_i, a.passage_j, a.via_area)
            .cmp(&(b.passage_i, b.passage_j, b.via_area))
    });

    let mut adjacency: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (idx, e) in edges.iter().enumerate() {
        adjacency.entry(e.passage_i).or_default().push(idx);
        adjacency.entry(e.passage_j).or_default().push(idx);
    }
    Ok(AreaGraph { vertices, edges, adjacency })
}

/// Text format: header line `osmag-dist v1 <map_hash> <resolution>`, then
/// CSV rows `area_id,passage_i,passage_j,distance_m` (3 decimals), rows
/// sorted lexicographically.
pub fn serialize_table(table: &IntraAreaDistanceTable) -> String {
    let mut rows: Vec<String> = table
        .entries
        .iter()
        .map(|((area, pi, pj), d)| format!("{area},{pi},{pj},{d:.3}"))
        .collect();
    rows.sort();
    let mut out = format!(
        "osmag-dist v{TABLE_FORMAT_VERSION} {} {}\n",
        table.map_hash, table.resolution
    );
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

pub fn save_table(table: &IntraAreaDistanceTable, path: &Path) -> Result<(), GraphError> {
    std::fs::write(path, serialize_table(table))?;
    Ok(())
}

pub fn parse_table(text: &str) -> Result<IntraAreaDistanceTable, GraphError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(GraphError::MalformedRow { line: 1, reason: "empty file".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "osmag-dist" {
        return Err(GraphError::MalformedRow { line: 1, reason: "bad header".into() });
    }
    if fields[1] != format!("v{TABLE_FORMAT_VERSION}") {
        return Err(GraphError::VersionMismatch { got: fields[1].to_string() });
    }
    let map_hash = fields[2].to_string();
    let resolution: f64 = fields[3]
        .parse()
        .map_err(|_| GraphError::MalformedRow { line: 1, reason: "bad resolution".into() })?;

    let mut entries = BTreeMap::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(GraphError::MalformedRow { line: i + 1, reason: format!("expected 4 columns, got {}", cols.len()) });
        }
        let area: i64 = cols[0].parse().map_err(|_| GraphError::MalformedRow { line: i + 1, reason: "bad area id".into() })?;
        let pi: i64 = cols[1].parse().map_err(|_| GraphError::MalformedRow { line: i + 1, reason: "bad passage id".into() })?;
        let pj: i64 = cols[2].parse().map_err(|_| GraphError::MalformedRow { line: i + 1, reason: "bad passage id".into() })?;
        let d: f64 = cols[3].parse().map_err(|_| GraphError::MalformedRow { line: i + 1, reason: "bad distance".into() })?;
        let (lo, hi) = if pi <= pj { (pi, pj) } else { (pj, pi) };
        entries.insert((area, lo, hi), d);
    }
    Ok(IntraAreaDistanceTable { entries, map_hash, resolution })
}

pub fn load_table(path: &Path) -> Result<IntraAreaDistanceTable, GraphError> {
    parse_table(&std::fs::read_to_string(path)?)
}

/// Distance table quantized exactly as the file format stores it, so a
/// freshly computed table can be compared against a loaded cache.
pub fn quantize_table(table: &IntraAreaDistanceTable) -> IntraAreaDistanceTable {
    IntraAreaDistanceTable {
        entries: table
            .entries
            .iter()
            .map(|(k, d)| (*k, format!("{d:.3}").parse().expect("fixed-point round trip")))
            .collect(),
        map_hash: table.map_hash.clone(),
        resolution: table.resolution,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
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
    fn opposite_wall_passages_measure_straight() {
        // Lobby (101) is 8 m wide; passages 206 (west wall) and 209 (east
        // wall) sit directly across from each other at y in [8,10]
        let map = fixture("campus_floor1.osm");
        let table = precompute_distances(&map, 0.1).unwrap();
        let d = table.get(101, 206, 209).expect("lobby pair present");
        assert!((d - 8.0).abs() < 0.2, "straight crossing, got {d}");
    }

    #[test]
    fn single_passage_area_has_no_entries() {
        let map = fixture("campus_floor1.osm");
        let table = precompute_distances(&map, 0.1).unwrap();
        // B101 (106) has a single door
        assert!(table.entries.keys().all(|(area, _, _)| *area != 106));
    }

    #[test]
    fn u_corridor_bends_well_past_euclidean() {
        let map = fixture("u_corridor.osm");
        let table = precompute_distances(&map, 0.1).unwrap();
        let d = table.get(101, 201, 202).expect("tip-to-tip pair");
        let p1 = map.passage(201).unwrap().midpoint();
        let p2 = map.passage(202).unwrap().midpoint();
        let euclid = p1.distance(&p2);
        assert!(d > euclid + 5.0, "U detour {d} vs euclid {euclid}");
        // and the lower bound the planner assumes
        assert!(d >= euclid - 2.0 * 0.1);
    }

    #[test]
    fn graph_counts_match_combinatorics() {
        let map = fixture("campus_floor1.osm");
        let table = precompute_distances(&map, 0.1).unwrap();
        let graph = build_area_graph(&map, &table).unwrap();
        assert_eq!(graph.vertices.len(), 16);
        // independent count: unordered passage pairs sharing an area
        let mut expected = 0;
        for area in map.areas.values() {
            let k = map.passages_of_area(area.id).len();
            expected += k * (k - 1) / 2;
        }
        assert_eq!(graph.edges.len(), expected);
    }

    #[test]
    fn stale_cache_is_rejected() {
        let map = fixture("campus_floor1.osm");
        let mut table = precompute_distances(&map, 0.1).unwrap();
        table.map_hash = "0000000000000000".into();
        assert!(matches!(
            build_area_graph(&map, &table),
            Err(GraphError::StaleCache { .. })
        ));
    }

    #[test]
    fn table_round_trips_and_rejects_bad_versions() {
        let map = fixture("two_routes.osm");
        let table = precompute_distances(&map, 0.1).unwrap();
        let text = serialize_table(&table);
        let back = parse_table(&text).unwrap();
        assert_eq!(back, quantize_table(&table));

        let v0 = text.replacen("osmag-dist v1", "osmag-dist v0", 1);
        assert!(matches!(parse_table(&v0), Err(GraphError::VersionMismatch { .. })));

        let hand = "osmag-dist v1 abcd1234abcd1234 0.1\n7,11,13,4.2\n";
        let t = parse_table(hand).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.get(7, 13, 11), Some(4.2));
    }
}
