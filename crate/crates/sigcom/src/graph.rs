//! Signed weighted undirected graphs and vertex partitions.
//!
//! Vertices are `0..n` internally; serialized forms use 1-based ids. Each
//! edge stores a weight in `(0, 1]` and a separate sign, mirroring how a
//! thresholded correlation matrix is turned into a graph: magnitude becomes
//! the weight, polarity becomes the sign.

use serde_json::{json, Value};

use crate::connectivity::ConnectivityMatrix;
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    /// Magnitude, in (0, 1].
    pub w: f64,
    /// +1 or −1.
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl SignedGraph {
    /// Builds a graph from `(i, j, weight, sign)` tuples (0-based endpoints,
    /// either order). Rejects self-loops, duplicate pairs, weights outside
    /// (0, 1], and signs other than ±1.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64, i8)>) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b, w, sign) in edges {
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if a == b {
                return Err(Error::Data(format!("self-loop on vertex {}", a + 1)));
            }
            if j >= n {
                return Err(Error::Data(format!(
                    "edge ({}, {}) exceeds vertex count {n}",
                    a + 1,
                    b + 1
                )));
            }
            if !(w > 0.0 && w <= 1.0) || !w.is_finite() {
                return Err(Error::Data(format!(
                    "edge ({}, {}) weight {w} outside (0, 1]",
                    a + 1,
                    b + 1
                )));
            }
            if sign != 1 && sign != -1 {
                return Err(Error::Data(format!(
                    "edge ({}, {}) sign {sign} is not ±1",
                    a + 1,
                    b + 1
                )));
            }
            list.push(Edge { i, j, w, sign });
        }
        list.sort_by_key(|a| (a.i, a.j));
        if let Some(pair) = list.windows(2).find(|p| (p[0].i, p[0].j) == (p[1].i, p[1].j)) {
            return Err(Error::Data(format!(
                "duplicate edge ({}, {})",
                pair[0].i + 1,
                pair[0].j + 1
            )));
        }
        Ok(SignedGraph { n, edges: list })
    }

    /// Thresholds a symmetric connectivity matrix into a graph: every
    /// off-diagonal pair with |value| > threshold becomes one edge with
    /// w = |value| and σ = sign(value). The diagonal is ignored.
    pub fn from_connectivity(m: &ConnectivityMatrix, threshold: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&threshold) {
            return Err(Error::Config(format!("threshold {threshold} outside [0, 1)")));
        }
        let n = m.n();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = m.values()[(i, j)];
                if v.abs() > threshold {
                    // Correlations can poke past 1.0 by rounding; clamp.
                    let w = v.abs().min(1.0);
                    edges.push((i, j, w, if v > 0.0 { 1i8 } else { -1i8 }));
                }
            }
        }
        SignedGraph::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Total |weight| over all edges.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Unsigned weighted adjacency matrix A, a_ij = |w|.
    pub fn adjacency(&self) -> SquareMatrix {
        let mut a = SquareMatrix::zeros(self.n);
        for e in &self.edges {
            a[(e.i, e.j)] = e.w;
            a[(e.j, e.i)] = e.w;
        }
        a
    }

    /// Signed weighted adjacency matrix S, s_ij = σ·w; A = |S| entrywise.
    pub fn signed_adjacency(&self) -> SquareMatrix {
        let mut s = SquareMatrix::zeros(self.n);
        for e in &self.edges {
            let v = e.w * f64::from(e.sign);
            s[(e.i, e.j)] = v;
            s[(e.j, e.i)] = v;
        }
        s
    }

    /// Unsigned degree of every vertex, d_i = Σ_j a_ij.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for e in &self.edges {
            d[e.i] += e.w;
            d[e.j] += e.w;
        }
        d
    }

    /// Laplacian L = D − A (unsigned weights).
    pub fn laplacian(&self) -> SquareMatrix {
        let mut l = SquareMatrix::zeros(self.n);
        for e in &self.edges {
            l[(e.i, e.j)] = -e.w;
            l[(e.j, e.i)] = -e.w;
            l[(e.i, e.i)] += e.w;
            l[(e.j, e.j)] += e.w;
        }
        l
    }

    /// Normalized Laplacian 𝓛 = D^(−1/2) L D^(−1/2). Errors when any vertex
    /// is isolated (its scaling is undefined).
    pub fn normalized_laplacian(&self) -> Result<SquareMatrix> {
        let d = self.degrees();
        if let Some(v) = d.iter().position(|&x| x == 0.0) {
            return Err(Error::Data(format!(
                "normalized Laplacian undefined: vertex {} is isolated",
                v + 1
            )));
        }
        let l = self.laplacian();
        let inv_sqrt: Vec<f64> = d.iter().map(|&x| 1.0 / x.sqrt()).collect();
        let mut nl = SquareMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                nl[(i, j)] = inv_sqrt[i] * l[(i, j)] * inv_sqrt[j];
            }
        }
        Ok(nl)
    }

    /// Splits into (positive-edge graph, negative-edge graph); both results
    /// carry all-positive signs and the full vertex set.
    pub fn split_signs(&self) -> (SignedGraph, SignedGraph) {
        let pos = self.edges.iter().filter(|e| e.sign > 0).map(|e| Edge { sign: 1, ..*e });
        let neg = self.edges.iter().filter(|e| e.sign < 0).map(|e| Edge { sign: 1, ..*e });
        (
            SignedGraph { n: self.n, edges: pos.collect() },
            SignedGraph { n: self.n, edges: neg.collect() },
        )
    }

    /// The same graph with every sign flipped.
    pub fn negated(&self) -> SignedGraph {
        SignedGraph {
            n: self.n,
            edges: self.edges.iter().map(|e| Edge { sign: -e.sign, ..*e }).collect(),
        }
    }

    /// Neighbor lists (vertex, weight, sign), ascending by neighbor id.
    pub fn neighbor_lists(&self) -> Vec<Vec<(usize, f64, i8)>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push((e.j, e.w, e.sign));
            adj[e.j].push((e.i, e.w, e.sign));
        }
        for list in &mut adj {
            list.sort_by_key(|a| a.0);
        }
        adj
    }

    /// Connected components over all edges regardless of sign, as a
    /// clustering (component of vertex 0 gets id 0, and so on).
    pub fn connected_components(&self) -> Clustering {
        let adj = self.neighbor_lists();
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut queue = std::collections::VecDeque::from([start]);
            comp[start] = next;
            while let Some(v) = queue.pop_front() {
                for &(u, _, _) in &adj[v] {
                    if comp[u] == usize::MAX {
                        comp[u] = next;
                        queue.push_back(u);
                    }
                }
            }
            next += 1;
        }
        Clustering::from_assignment(comp)
    }

    /// Subgraph induced by `vertices` (any order; deduplicated ascending).
    /// Local vertex `k` corresponds to the k-th smallest input vertex.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> SignedGraph {
        let mut verts: Vec<usize> = vertices.to_vec();
        verts.sort_unstable();
        verts.dedup();
        let mut local = vec![usize::MAX; self.n];
        for (k, &v) in verts.iter().enumerate() {
            local[v] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| local[e.i] != usize::MAX && local[e.j] != usize::MAX)
            .map(|e| Edge { i: local[e.i], j: local[e.j], ..*e })
            .collect();
        SignedGraph { n: verts.len(), edges }
    }

    /// JSON form `{n, edges: [[i, j, w, sigma], …]}` with 1-based ids.
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "edges": self
                .edges
                .iter()
                .map(|e| json!([e.i + 1, e.j + 1, e.w, e.sign]))
                .collect::<Vec<_>>(),
        })
    }
}

/// A partition of `0..n` into `k` non-empty clusters.
///
/// Stored canonically: cluster ids are assigned in order of each cluster's
/// smallest member, so id 0 always contains vertex 0. This keeps reports and
/// serialized artifacts deterministic no matter how a method labeled its
/// output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    assignment: Vec<usize>,
    k: usize,
}

impl Clustering {
    /// Builds from an arbitrary per-vertex label vector (labels need not be
    /// contiguous); relabels canonically.
    pub fn from_assignment(raw: Vec<usize>) -> Self {
        let mut map = std::collections::HashMap::new();
        let mut assignment = Vec::with_capacity(raw.len());
        for label in raw {
            let next = map.len();
            let id = *map.entry(label).or_insert(next);
            assignment.push(id);
        }
        Clustering { k: map.len(), assignment }
    }

    /// Builds from explicit member lists; they must partition `0..n`.
    pub fn from_clusters(n: usize, clusters: &[Vec<usize>]) -> Result<Self> {
        let mut raw = vec![usize::MAX; n];
        for (id, members) in clusters.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::Data(format!("cluster {} is empty", id + 1)));
            }
            for &v in members {
                if v >= n {
                    return Err(Error::Data(format!("vertex {} out of range", v + 1)));
                }
                if raw[v] != usize::MAX {
                    return Err(Error::Data(format!("vertex {} in two clusters", v + 1)));
                }
                raw[v] = id;
            }
        }
        if let Some(v) = raw.iter().position(|&c| c == usize::MAX) {
            return Err(Error::Data(format!("vertex {} unassigned", v + 1)));
        }
        Ok(Clustering::from_assignment(raw))
    }

    /// Everything in one cluster.
    pub fn whole(n: usize) -> Self {
        Clustering { assignment: vec![0; n], k: if n == 0 { 0 } else { 1 } }
    }

    /// Every vertex its own cluster.
    pub fn singletons(n: usize) -> Self {
        Clustering { assignment: (0..n).collect(), k: n }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Per-vertex cluster ids, 0-based.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Member lists, indexed by cluster id; members ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Replaces cluster `id` by the two given halves (which must partition
    /// it); the result is re-canonicalized.
    pub fn split_cluster(&self, id: usize, left: &[usize], right: &[usize]) -> Result<Self> {
        let members = &self.clusters()[id];
        let mut check: Vec<usize> = left.iter().chain(right).copied().collect();
        check.sort_unstable();
        if left.is_empty() || right.is_empty() || &check != members {
            return Err(Error::Data(format!(
                "split of cluster {} does not partition it",
                id + 1
            )));
        }
        let mut raw = self.assignment.clone();
        for &v in right {
            raw[v] = self.k; // fresh label; canonicalization renumbers
        }
        Ok(Clustering::from_assignment(raw))
    }
}
