//! Weighted search over the task graph.
//!
//! Edge (i, j) through area a costs `d_ij + pc_i + pc_j + W_soft·[a soft]`;
//! virtual edges cost their grid distance plus the real endpoint's pc.
//! Search is A* with a Euclidean heuristic lowered by the total grid
//! quantization slack (configurable down to plain Dijkstra); node
//! reopening keeps it exact even where float rounding nicks consistency.
//! Equal-cost paths resolve to the lexicographically smallest passage-id
//! sequence.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::Serialize;

use super::task_graph::TaskGraph;
use super::{Heuristic, PlannerConfig};
use crate::copilot::PassageCostMap;

/// An approved, ordered route: the passage sequence and the areas it
/// drives through (one more area than passages).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathPlan {
    pub passages: Vec<i64>,
    pub areas: Vec<i64>,
    /// Total weighted cost (distance + passage costs + soft penalties).
    pub est_cost: f64,
    /// Pure distance component.
    pub est_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Vertex {
    Start,
    Passage(i64),
    Dest,
}

struct QueueEntry {
    f: f64,
    seq: u64,
    vertex: Vertex,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f && self.seq == other.seq
    }
}
impl Eq for QueueEntry {}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .partial_cmp(&self.f)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Clone)]
struct NodeState {
    g: f64,
    length: f64,
    parent: Option<(Vertex, i64)>, // predecessor and the area the edge crosses
}

pub fn shortest_path(
    tg: &TaskGraph,
    costs: &PassageCostMap,
    soft_avoid: &std::collections::BTreeSet<i64>,
    config: &PlannerConfig,
) -> Option<PathPlan> {
    let w_soft = config.w_soft;
    let pc = |p: i64| costs.cost(p).max(0.0);

    // admissible heuristic: euclidean to the goal anchor minus the
    // accumulated per-edge grid slack a worst-case path could carry
    let slack = 2.0 * tg.resolution * (tg.base.vertices.len() as f64 + 2.0);
    let h = |v: Vertex| -> f64 {
        match config.heuristic {
            Heuristic::None => 0.0,
            Heuristic::Euclidean => match v {
                Vertex::Dest => 0.0,
                Vertex::Start => (tg.start_point.distance(&tg.dest_anchor) - slack).max(0.0),
                Vertex::Passage(p) => {
                    let m = tg.midpoints[&p];
                    (m.distance(&tg.dest_anchor) - slack).max(0.0)
                }
            },
        }
    };

    let mut states: HashMap<Vertex, NodeState> = HashMap::new();
    states.insert(Vertex::Start, NodeState { g: 0.0, length: 0.0, parent: None });
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(QueueEntry { f: h(Vertex::Start), seq, vertex: Vertex::Start });

    // reconstructs the passage-id sequence up to a vertex (for lex ties)
    let id_sequence = |states: &HashMap<Vertex, NodeState>, mut v: Vertex| -> Vec<i64> {
        let mut rev = Vec::new();
        loop {
            if let Vertex::Passage(p) = v {
                rev.push(p);
            }
            match states.get(&v).and_then(|s| s.parent) {
                Some((prev, _)) => v = prev,
                None => break,
            }
        }
        rev.reverse();
        rev
    };

    while let Some(QueueEntry { vertex, .. }) = heap.pop() {
        let cur = states.get(&vertex).expect("queued vertices have state").clone();
        if vertex == Vertex::Dest {
            // with an admissible heuristic the first pop of Dest is optimal
            return Some(reconstruct(tg, &states));
        }

        // enumerate outgoing edges as (target, base_distance, edge_cost, via_area)
        let mut outgoing: Vec<(Vertex, f64, f64, i64)> = Vec::new();
        match vertex {
            Vertex::Start => {
                for &(p, d) in &tg.start_edges {
                    outgoing.push((Vertex::Passage(p), d, d + pc(p), tg.start_area));
                }
                if let Some(d) = tg.direct {
                    outgoing.push((Vertex::Dest, d, d, tg.start_area));
                }
            }
            Vertex::Passage(p) => {
                for edge in tg.base.edges_of(p) {
                    let q = if edge.passage_i == p { edge.passage_j } else { edge.passage_i };
                    if tg.removed_passages.contains(&q) || tg.removed_areas.contains(&edge.via_area) {
                        continue;
                    }
                    let soft = if soft_avoid.contains(&edge.via_area) { w_soft } else { 0.0 };
                    outgoing.push((
                        Vertex::Passage(q),
                        edge.distance,
                        edge.distance + pc(p) + pc(q) + soft,
                        edge.via_area,
                    ));
                }
                for &(dp, d) in &tg.dest_edges {
                    if dp == p {
                        outgoing.push((Vertex::Dest, d, d + pc(p), tg.dest_area));
                    }
                }
            }
            Vertex::Dest => unreachable!("handled above"),
        }

        for (target, base_d, edge_cost, via) in outgoing {
            let cand_g = cur.g + edge_cost;
            let cand_len = cur.length + base_d;
            let improve = match states.get(&target) {
                None => true,
                Some(s) if cand_g < s.g => true,
                Some(s) if cand_g == s.g => {
                    // lexicographic tie-break on the passage-id sequence
                    let mut mine = id_sequence(&states, vertex);
                    if let Vertex::Passage(p) = target {
                        mine.push(p);
                    }
                    let theirs = id_sequence(&states, target);
                    mine < theirs
                }
                _ => false,
            };
            if improve {
                states.insert(target, NodeState { g: cand_g, length: cand_len, parent: Some((vertex, via)) });
                seq += 1;
                heap.push(QueueEntry { f: cand_g + h(target), seq, vertex: target });
            }
        }
    }
    None
}

fn reconstruct(tg: &TaskGraph, states: &HashMap<Vertex, NodeState>) -> PathPlan {
    let final_state = &states[&Vertex::Dest];
    let mut passages_rev = Vec::new();
    let mut vias_rev = Vec::new();
    let mut v = Vertex::Dest;
    loop {
        match states[&v].parent {
            Some((prev, via)) => {
                vias_rev.push(via);
                if let Vertex::Passage(p) = prev {
                    passages_rev.push(p);
                }
                v = prev;
            }
            None => break,
        }
    }
    passages_rev.reverse();
    vias_rev.reverse();
    // vias: [start_area, via_1, ..., dest_area]; for the direct edge it is
    // just [start_area]
    let areas = if vias_rev.len() == 1 {
        vias_rev
    } else {
        let mut a = vias_rev;
        *a.last_mut().expect("nonempty") = tg.dest_area;
        a
    };
    PathPlan {
        passages: passages_rev,
        areas,
        est_cost: final_state.g,
        est_length: final_state.length,
    }
}
