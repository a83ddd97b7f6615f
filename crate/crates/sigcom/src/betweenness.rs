//! Method C: edge betweenness (Brandes dependency accumulation over
//! Dijkstra trees, fractional tie splitting) and the iterative
//! highest-betweenness edge-removal loop. Signs are ignored for path
//! finding; they re-enter only through the q_s scoring of each level.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{Clustering, SignedGraph};
use crate::modularity::signed_modularity_or_zero;
use crate::report::{Level, MethodId, MethodReport, SplitInfo};

/// How edge weights translate into shortest-path lengths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EdgeLengthMode {
    /// Length 1/w — stronger coupling means a shorter tie.
    #[default]
    InverseWeight,
    /// Classic hop counting; weights ignored.
    Unit,
}

/// One step of the removal loop.
#[derive(Clone, Copy, Debug)]
pub struct RemovalStep {
    pub i: usize,
    pub j: usize,
    pub betweenness: f64,
    pub components_after: usize,
}

/// Min-heap entry ordered by (distance, vertex id) so that equal-distance
/// pops settle the smaller vertex first — determinism, not correctness,
/// depends on this.
#[derive(Clone, Copy)]
struct HeapItem {
    dist: f64,
    v: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the nearest vertex.
        other.dist.total_cmp(&self.dist).then_with(|| other.v.cmp(&self.v))
    }
}

/// Adjacency lists as (neighbor, edge id, length), in master edge order.
fn build_adjacency(
    n: usize,
    master: &[(usize, usize, f64)],
    alive: &[bool],
) -> Vec<Vec<(usize, usize, f64)>> {
    let mut adj = vec![Vec::new(); n];
    for (eid, &(i, j, len)) in master.iter().enumerate() {
        if alive[eid] {
            adj[i].push((j, eid, len));
            adj[j].push((i, eid, len));
        }
    }
    adj
}

/// One source's Brandes pass: Dijkstra with exact-equality tie detection
/// (edge lengths are ≥ 1, so a settled vertex can never be re-reached at an
/// equal distance), then dependency accumulation in reverse settling order.
/// Adds each pair's contribution once per endpoint, so the caller halves.
fn single_source_scores(
    n: usize,
    adj: &[Vec<(usize, usize, f64)>],
    s: usize,
    raw: &mut [f64],
) {
    let mut dist = vec![f64::INFINITY; n];
    let mut sigma = vec![0.0; n];
    let mut visited = vec![false; n];
    let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    sigma[s] = 1.0;
    heap.push(HeapItem { dist: 0.0, v: s });
    while let Some(HeapItem { v, .. }) = heap.pop() {
        if visited[v] {
            continue;
        }
        visited[v] = true;
        order.push(v);
        for &(u, eid, len) in &adj[v] {
            if visited[u] {
                continue;
            }
            let nd = dist[v] + len;
            if nd < dist[u] {
                dist[u] = nd;
                sigma[u] = sigma[v];
                preds[u].clear();
                preds[u].push((v, eid));
                heap.push(HeapItem { dist: nd, v: u });
            } else if nd == dist[u] {
                sigma[u] += sigma[v];
                preds[u].push((v, eid));
            }
        }
    }
    let mut delta = vec![0.0; n];
    for &w in order.iter().rev() {
        for &(u, eid) in &preds[w] {
            let c = sigma[u] / sigma[w] * (1.0 + delta[w]);
            raw[eid] += c;
            delta[u] += c;
        }
    }
}

/// Recomputes scores for all alive edges whose endpoints lie in `vertices`
/// (which must be a union of whole components), leaving other edges alone.
fn recompute_within(
    n: usize,
    master: &[(usize, usize, f64)],
    alive: &[bool],
    vertices: &[usize],
    scores: &mut [f64],
) {
    let mut in_set = vec![false; n];
    for &v in vertices {
        in_set[v] = true;
    }
    let adj = build_adjacency(n, master, alive);
    let mut raw = vec![0.0; master.len()];
    for &s in vertices {
        single_source_scores(n, &adj, s, &mut raw);
    }
    for (eid, &(i, j, _)) in master.iter().enumerate() {
        if alive[eid] && in_set[i] && in_set[j] {
            scores[eid] = raw[eid] / 2.0;
        }
    }
}

/// Connected components of the alive-edge graph, labels canonical.
fn components_masked(n: usize, master: &[(usize, usize, f64)], alive: &[bool]) -> Clustering {
    let adj = build_adjacency(n, master, alive);
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &(u, _, _) in &adj[v] {
                if label[u] == usize::MAX {
                    label[u] = next;
                    queue.push_back(u);
                }
            }
        }
        next += 1;
    }
    Clustering::from_assignment(label)
}

fn master_edges(g: &SignedGraph, mode: EdgeLengthMode) -> Vec<(usize, usize, f64)> {
    g.edges()
        .iter()
        .map(|e| {
            let len = match mode {
                EdgeLengthMode::InverseWeight => 1.0 / e.w,
                EdgeLengthMode::Unit => 1.0,
            };
            (e.i, e.j, len)
        })
        .collect()
}

/// Betweenness of every edge, aligned with `g.edges()` order. Each unordered
/// same-component vertex pair distributes one unit of weight equally over its
/// tied shortest paths; an edge's score sums the fractions of paths through it.
pub fn edge_betweenness(g: &SignedGraph, mode: EdgeLengthMode) -> Result<Vec<f64>> {
    if g.n() == 0 {
        return Err(Error::Data("empty vertex set".into()));
    }
    let master = master_edges(g, mode);
    let alive = vec![true; master.len()];
    let mut scores = vec![0.0; master.len()];
    let all: Vec<usize> = (0..g.n()).collect();
    recompute_within(g.n(), &master, &alive, &all, &mut scores);
    Ok(scores)
}

/// The removal loop: repeatedly delete the highest-betweenness edge (ties to
/// the lexicographically smallest pair), recompute betweenness only inside
/// the affected component(s), and record a dendrogram level whenever the
/// component count grows. Levels are scored against the original signed
/// graph; chosen = max q_s, ties to fewest clusters.
pub fn method_c(
    g: &SignedGraph,
    mode: EdgeLengthMode,
) -> Result<(MethodReport, Vec<RemovalStep>)> {
    if g.n() == 0 {
        return Err(Error::Data("empty vertex set".into()));
    }
    let mut notes = Vec::new();
    if g.edge_count() == 0 {
        notes.push("graph has no edges; every level scores q_s = 0".to_string());
    }
    let master = master_edges(g, mode);
    let mut alive = vec![true; master.len()];
    let mut scores = vec![0.0; master.len()];

    let initial = components_masked(g.n(), &master, &alive);
    let mut levels = vec![Level {
        k: initial.k(),
        clustering: initial.clone(),
        split: None,
        q_s: signed_modularity_or_zero(g, &initial),
    }];
    let all: Vec<usize> = (0..g.n()).collect();
    recompute_within(g.n(), &master, &alive, &all, &mut scores);

    let mut steps = Vec::with_capacity(master.len());
    while alive.iter().any(|&a| a) {
        let mut best: Option<usize> = None;
        for eid in 0..master.len() {
            if alive[eid] && (best.is_none() || scores[eid] > scores[best.unwrap()]) {
                best = Some(eid);
            }
        }
        let eid = best.unwrap();
        alive[eid] = false;
        let (i, j, _) = master[eid];

        let comps = components_masked(g.n(), &master, &alive);
        steps.push(RemovalStep {
            i,
            j,
            betweenness: scores[eid],
            components_after: comps.k(),
        });

        let asg = comps.assignment();
        let clusters = comps.clusters();
        let (ci, cj) = (asg[i], asg[j]);
        let mut affected = clusters[ci].clone();
        if cj != ci {
            affected.extend_from_slice(&clusters[cj]);
            affected.sort_unstable();
        }
        recompute_within(g.n(), &master, &alive, &affected, &mut scores);

        let prev_k = levels.last().unwrap().k;
        if comps.k() > prev_k {
            let parent = levels.last().unwrap().clustering.assignment()[i];
            let split = SplitInfo { parent, child_a: ci, child_b: cj };
            levels.push(Level {
                k: comps.k(),
                clustering: comps.clone(),
                split: Some(split),
                q_s: signed_modularity_or_zero(g, &comps),
            });
        }
    }
    Ok((MethodReport::new(MethodId::C, levels, notes), steps))
}
