//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here is deliberately naive: the oracles enumerate rather than
//! optimize, so they are slow but hard to get wrong, and the suites compare
//! the fast implementations against them.

#![allow(dead_code)] // each integration test crate uses a different subset

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sigcom::connectivity::{ConnectivityMatrix, MatrixKind};
use sigcom::graph::{Clustering, SignedGraph};
use sigcom::matrix::SquareMatrix;
use sigcom::modularity::signed_modularity_or_zero;

/// Nine-channel example couplings, in tenths. Channels 1–5 form one block,
/// 6–9 the other, with a handful of negative entries inside and across.
pub const EXAMPLE_COUPLINGS_TENTHS: [[i32; 9]; 9] = [
    [0, 1, 0, 8, -2, 0, 0, 0, -1],
    [1, 0, 6, 7, 3, 0, 0, 8, 0],
    [0, 6, 0, 5, -6, 0, 0, 0, 0],
    [8, 7, 5, 0, 1, 0, -7, 0, 0],
    [-2, 3, -6, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 7, 9, -1],
    [0, 0, 0, -7, 0, 7, 0, 6, 5],
    [0, 8, 0, 0, 0, 9, 6, 0, 6],
    [-1, 0, 0, 0, 0, -1, 5, 6, 0],
];

/// The example couplings as a correlation-kind connectivity matrix.
pub fn example_matrix() -> ConnectivityMatrix {
    let mut values = Vec::with_capacity(81);
    for row in EXAMPLE_COUPLINGS_TENTHS.iter() {
        for &v in row.iter() {
            values.push(f64::from(v) / 10.0);
        }
    }
    ConnectivityMatrix::from_values(
        MatrixKind::Correlation,
        0,
        SquareMatrix::from_row_major(9, values),
    )
    .expect("example matrix is symmetric and finite")
}

/// The example graph: 9 vertices, 18 edges, 5 of them negative.
pub fn example_graph() -> SignedGraph {
    SignedGraph::from_connectivity(&example_matrix(), 0.0).expect("example graph builds")
}

/// The example's two visible blocks: {1..5} and {6..9} in 1-based labels.
pub fn example_blocks() -> Clustering {
    Clustering::from_clusters(9, &[vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8]])
        .expect("block partition is valid")
}

/// Every partition of {0, …, n−1} as a canonical assignment vector
/// (restricted growth: a[0] = 0, a[i] ≤ max(a[..i]) + 1). The count is the
/// Bell number B_n, so keep n small.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    assert!((1..=12).contains(&n), "enumeration is only sane for small n");
    let mut out = Vec::new();
    let mut a = vec![0usize; n];
    fn grow(a: &mut Vec<usize>, i: usize, max_used: usize, out: &mut Vec<Vec<usize>>) {
        if i == a.len() {
            out.push(a.clone());
            return;
        }
        for label in 0..=max_used + 1 {
            a[i] = label;
            grow(a, i + 1, max_used.max(label), out);
        }
    }
    if n == 1 {
        return vec![vec![0]];
    }
    grow(&mut a, 1, 0, &mut out);
    out
}

/// Exhaustive maximum of q_s over every partition with at most `k_max`
/// clusters. Returns the maximum and one partition attaining it (the first
/// in enumeration order).
pub fn exhaustive_max_qs(g: &SignedGraph, k_max: usize) -> (f64, Clustering) {
    let mut best = f64::NEG_INFINITY;
    let mut best_c = Clustering::whole(g.n());
    for a in all_partitions(g.n()) {
        let c = Clustering::from_assignment(a);
        if c.k() > k_max {
            continue;
        }
        let q = signed_modularity_or_zero(g, &c);
        if q > best {
            best = q;
            best_c = c;
        }
    }
    (best, best_c)
}

/// Brute-force edge betweenness: per unordered same-component pair, count
/// shortest paths through each edge orientation by path counting on the
/// shortest-path DAG, split ties equally. Lengths are 1/w, or 1 when
/// `unit_lengths` is set. Scores align with `g.edges()` order.
pub fn oracle_edge_betweenness(g: &SignedGraph, unit_lengths: bool) -> Vec<f64> {
    let n = g.n();
    let edges: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .map(|e| (e.i, e.j, if unit_lengths { 1.0 } else { 1.0 / e.w }))
        .collect();
    let mut adj = vec![Vec::new(); n];
    for (eid, &(i, j, len)) in edges.iter().enumerate() {
        adj[i].push((j, eid, len));
        adj[j].push((i, eid, len));
    }

    // Exhaustive Dijkstra per source: settle the closest unvisited vertex by
    // scanning, which is plenty for oracle-sized graphs.
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    let mut sigma = vec![vec![0.0f64; n]; n];
    for s in 0..n {
        let d = &mut dist[s];
        let sg = &mut sigma[s];
        d[s] = 0.0;
        sg[s] = 1.0;
        let mut visited = vec![false; n];
        loop {
            let mut v = usize::MAX;
            for cand in 0..n {
                if !visited[cand]
                    && d[cand].is_finite()
                    && (v == usize::MAX || d[cand] < d[v])
                {
                    v = cand;
                }
            }
            if v == usize::MAX {
                break;
            }
            visited[v] = true;
            for &(u, _, len) in &adj[v] {
                if visited[u] {
                    continue;
                }
                let nd = d[v] + len;
                if nd < d[u] {
                    d[u] = nd;
                    sg[u] = sg[v];
                } else if nd == d[u] {
                    sg[u] += sg[v];
                }
            }
        }
    }

    let mut scores = vec![0.0f64; edges.len()];
    for s in 0..n {
        for t in (s + 1)..n {
            if !dist[s][t].is_finite() || sigma[s][t] == 0.0 {
                continue;
            }
            for (eid, &(i, j, len)) in edges.iter().enumerate() {
                // Paths crossing i→j, then paths crossing j→i.
                if dist[s][i] + len + dist[j][t] == dist[s][t] {
                    scores[eid] += sigma[s][i] * sigma[t][j] / sigma[s][t];
                }
                if dist[s][j] + len + dist[i][t] == dist[s][t] {
                    scores[eid] += sigma[s][j] * sigma[t][i] / sigma[s][t];
                }
            }
        }
    }
    scores
}

/// Weights whose inverses are exact doubles, so tied path lengths compare
/// exactly equal in both the oracle and the implementation.
pub const EXACT_WEIGHTS: [f64; 4] = [0.2, 0.25, 0.5, 1.0];

/// Seeded random signed graph on n vertices with edge probability p.
/// Weights come from `EXACT_WEIGHTS`; signs are negative with probability
/// `neg_p`. May be disconnected or empty.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, neg_p: f64) -> SignedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < p {
                let w = EXACT_WEIGHTS[rng.gen_range(0..EXACT_WEIGHTS.len())];
                let sigma = if rng.gen::<f64>() < neg_p { -1i8 } else { 1i8 };
                edges.push((i, j, w, sigma));
            }
        }
    }
    SignedGraph::new(n, edges).expect("generated edges are valid")
}

/// Like `random_graph` but guaranteed connected: a random spanning tree is
/// laid down first, then extra edges are sprinkled on top.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, extra_p: f64, neg_p: f64) -> SignedGraph {
    let mut present = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    let add = |edges: &mut Vec<(usize, usize, f64, i8)>,
                   present: &mut Vec<Vec<bool>>,
                   rng: &mut ChaCha8Rng,
                   i: usize,
                   j: usize| {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        if present[i][j] {
            return;
        }
        present[i][j] = true;
        let w = EXACT_WEIGHTS[rng.gen_range(0..EXACT_WEIGHTS.len())];
        let sigma = if rng.gen::<f64>() < neg_p { -1i8 } else { 1i8 };
        edges.push((i, j, w, sigma));
    };
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        add(&mut edges, &mut present, rng, parent, v);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !present[i][j] && rng.gen::<f64>() < extra_p {
                add(&mut edges, &mut present, rng, i, j);
            }
        }
    }
    SignedGraph::new(n, edges).expect("generated edges are valid")
}

/// Random partition of n vertices into at most k_max nonempty clusters.
pub fn random_partition(rng: &mut ChaCha8Rng, n: usize, k_max: usize) -> Clustering {
    let k = rng.gen_range(1..=k_max.min(n));
    let mut a: Vec<usize> = (0..n).map(|v| if v < k { v } else { rng.gen_range(0..k) }).collect();
    // Shuffle which vertices carry the forced labels so cluster 0 is not
    // always vertex 0.
    for v in (1..n).rev() {
        let u = rng.gen_range(0..=v);
        a.swap(u, v);
    }
    Clustering::from_assignment(a)
}

/// Absolute-difference assertion with context.
pub fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got}, want {want} (tol {tol})"
    );
}
