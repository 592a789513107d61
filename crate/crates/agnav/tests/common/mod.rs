//! Shared helpers for the integration suites: fixture loading and an
//! exhaustive-enumeration reference for the planner. The oracle shares
//! nothing with the search implementation except the task graph data it
//! reads, and it sums edge costs in the same left-to-right order so agreeing
//! paths agree bit-for-bit.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use agnav::copilot::PassageCostMap;
use agnav::graph::{precompute_distances, IntraAreaDistanceTable};
use agnav::map::{parse_osmag, project, MapDocument, ProjectedMap};
use agnav::planner::{PlannerConfig, TaskGraph};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture readable")
}

pub fn load_doc(name: &str) -> MapDocument {
    parse_osmag(&fixture_text(name)).expect("fixture parses")
}

pub fn load_projected(name: &str) -> (MapDocument, ProjectedMap) {
    let doc = load_doc(name);
    let map = project(&doc).expect("fixture projects");
    (doc, map)
}

pub fn load_with_table(name: &str, resolution: f64) -> (MapDocument, ProjectedMap, IntraAreaDistanceTable) {
    let (doc, map) = load_projected(name);
    let table = precompute_distances(&map, resolution).expect("distances");
    (doc, map, table)
}

/// Reference answer: the cheapest simple passage sequence from the virtual
/// start to the virtual destination, found by exhaustive depth-first
/// enumeration. Ties resolve to the lexicographically smallest sequence.
pub fn enumerate_min_cost(
    tg: &TaskGraph,
    costs: &PassageCostMap,
    soft_avoid: &BTreeSet<i64>,
    config: &PlannerConfig,
) -> Option<(f64, Vec<i64>)> {
    let mut best: Option<(f64, Vec<i64>)> = None;
    let pc = |p: i64| costs.cost(p).max(0.0);

    let mut consider = |cost: f64, seq: &[i64], best: &mut Option<(f64, Vec<i64>)>| {
        let better = match best {
            None => true,
            Some((bc, bseq)) => cost < *bc || (cost == *bc && seq < bseq.as_slice()),
        };
        if better {
            *best = Some((cost, seq.to_vec()));
        }
    };

    // direct same-area edge
    if let Some(d) = tg.direct {
        consider(d, &[], &mut best);
    }

    struct Dfs<'a> {
        tg: &'a TaskGraph<'a>,
        soft: &'a BTreeSet<i64>,
        w_soft: f64,
    }
    impl Dfs<'_> {
        fn run(
            &self,
            at: i64,
            cost_so_far: f64,
            seq: &mut Vec<i64>,
            visited: &mut BTreeSet<i64>,
            pc: &dyn Fn(i64) -> f64,
            consider: &mut dyn FnMut(f64, &[i64]),
        ) {
            for &(dp, d) in &self.tg.dest_edges {
                if dp == at {
                    consider(cost_so_far + (d + pc(at)), seq);
                }
            }
            for edge in self.tg.base.edges_of(at) {
                let q = if edge.passage_i == at { edge.passage_j } else { edge.passage_i };
                if visited.contains(&q)
                    || self.tg.removed_passages.contains(&q)
                    || self.tg.removed_areas.contains(&edge.via_area)
                {
                    continue;
                }
                let soft = if self.soft.contains(&edge.via_area) { self.w_soft } else { 0.0 };
                let step = edge.distance + pc(at) + pc(q) + soft;
                visited.insert(q);
                seq.push(q);
                self.run(q, cost_so_far + step, seq, visited, pc, consider);
                seq.pop();
                visited.remove(&q);
            }
        }
    }

    let dfs = Dfs { tg, soft: soft_avoid, w_soft: config.w_soft };
    for &(p, d) in &tg.start_edges {
        let mut seq = vec![p];
        let mut visited = BTreeSet::from([p]);
        let entry = d + pc(p);
        dfs.run(
            p,
            entry,
            &mut seq,
            &mut visited,
            &pc,
            &mut |cost, seq| consider(cost, seq, &mut best),
        );
    }
    best
}
