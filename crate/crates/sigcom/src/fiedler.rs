//! Method A: recursive Fiedler-vector bisection on the unsigned weighted
//! graph. The cluster split next is always the one whose induced subgraph has
//! the smallest normalized algebraic connectivity — loosely connected
//! clusters are broken up first, tightly knit ones postponed.

use crate::error::{Error, Result};
use crate::graph::{Clustering, SignedGraph};
use crate::linalg::eig_symmetric;
use crate::modularity::signed_modularity_or_zero;
use crate::report::{Level, MethodId, MethodReport, SplitInfo};

/// Second-smallest eigenvalue of the normalized Laplacian. Exactly 0 for a
/// disconnected graph (no eigensolve needed); errors on fewer than two
/// vertices and on an isolated vertex, whose normalized Laplacian row is
/// undefined.
pub fn normalized_algebraic_connectivity(g: &SignedGraph) -> Result<f64> {
    if g.n() < 2 {
        return Err(Error::Data(format!(
            "normalized algebraic connectivity needs at least 2 vertices, got {}",
            g.n()
        )));
    }
    if g.degrees().contains(&0.0) {
        return Err(Error::Data("graph has an isolated vertex".into()));
    }
    if g.connected_components().k() > 1 {
        return Ok(0.0);
    }
    let eig = eig_symmetric(&g.normalized_laplacian()?)?;
    // Rounding can push the theoretical ≥ 0 value a hair below zero.
    Ok(eig.eigenvalues[1].max(0.0))
}

/// Splits a connected graph by the sign pattern of its Fiedler vector
/// (eigenvector of L for the second-smallest eigenvalue, canonical sign):
/// entries ≤ 0 on one side, > 0 on the other. Both sides are non-empty
/// because the vector is orthogonal to the all-ones vector.
pub fn fiedler_bisect(g: &SignedGraph) -> Result<(Vec<usize>, Vec<usize>)> {
    if g.n() < 2 {
        return Err(Error::Data("cannot bisect fewer than 2 vertices".into()));
    }
    if g.connected_components().k() > 1 {
        return Err(Error::Data(
            "Fiedler bisection needs a connected graph; split components first".into(),
        ));
    }
    let eig = eig_symmetric(&g.laplacian())?;
    let x = eig.vector(1);
    let mut v1 = Vec::new();
    let mut v2 = Vec::new();
    for (i, &xi) in x.iter().enumerate() {
        if xi <= 0.0 {
            v1.push(i);
        } else {
            v2.push(i);
        }
    }
    if v1.is_empty() || v2.is_empty() {
        return Err(Error::Numeric(
            "Fiedler vector produced an empty side; eigenvector is degenerate".into(),
        ));
    }
    Ok((v1, v2))
}

/// Splits one cluster's induced subgraph: disconnected subgraphs split into
/// largest component vs the rest (ties: the component holding the smallest
/// vertex), connected ones by the Fiedler sign rule. Returns local indices.
fn split_once(sub: &SignedGraph) -> Result<(Vec<usize>, Vec<usize>)> {
    let comps = sub.connected_components();
    if comps.k() > 1 {
        let clusters = comps.clusters();
        let mut largest = 0;
        for (i, c) in clusters.iter().enumerate() {
            if c.len() > clusters[largest].len() {
                largest = i;
            }
        }
        let left = clusters[largest].clone();
        let mut right: Vec<usize> = (0..sub.n()).filter(|v| !left.contains(v)).collect();
        right.sort_unstable();
        Ok((left, right))
    } else {
        fiedler_bisect(sub)
    }
}

/// Runs the full top-down bisection to n singletons, scoring every level's
/// clustering with signed modularity against the original signed graph, and
/// chooses the level with maximum q_s (ties: fewest clusters).
pub fn method_a(g: &SignedGraph) -> Result<MethodReport> {
    if g.n() == 0 {
        return Err(Error::Data("empty vertex set".into()));
    }
    let mut notes = Vec::new();
    if g.edge_count() == 0 {
        notes.push("graph has no edges; every level scores q_s = 0".to_string());
    }
    let mut current = Clustering::whole(g.n());
    let mut levels = vec![Level {
        k: 1,
        clustering: current.clone(),
        split: None,
        q_s: signed_modularity_or_zero(g, &current),
    }];
    while current.k() < g.n() {
        // Next cluster to split: minimum ᾱ among clusters of size ≥ 2; the
        // canonical cluster order makes ties fall to the smallest member.
        let clusters = current.clusters();
        let mut target: Option<(usize, f64)> = None;
        for (id, members) in clusters.iter().enumerate() {
            if members.len() < 2 {
                continue;
            }
            let sub = g.induced_subgraph(members);
            let alpha = if sub.connected_components().k() > 1 {
                0.0
            } else {
                normalized_algebraic_connectivity(&sub)?
            };
            if target.is_none() || alpha < target.unwrap().1 {
                target = Some((id, alpha));
            }
        }
        let (id, _) = target.expect("a cluster of size >= 2 exists while k < n");
        let members = &clusters[id];
        let sub = g.induced_subgraph(members);
        let (left_local, right_local) = split_once(&sub)?;
        let left: Vec<usize> = left_local.iter().map(|&i| members[i]).collect();
        let right: Vec<usize> = right_local.iter().map(|&i| members[i]).collect();
        current = current.split_cluster(id, &left, &right)?;
        let split = SplitInfo {
            parent: id,
            child_a: current.assignment()[left[0]],
            child_b: current.assignment()[right[0]],
        };
        levels.push(Level {
            k: current.k(),
            clustering: current.clone(),
            split: Some(split),
            q_s: signed_modularity_or_zero(g, &current),
        });
    }
    Ok(MethodReport::new(MethodId::A, levels, notes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, pairs: &[(usize, usize)]) -> SignedGraph {
        SignedGraph::new(n, pairs.iter().map(|&(i, j)| (i, j, 1.0, 1))).unwrap()
    }

    fn two_triangles_bridged() -> SignedGraph {
        unit(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
    }

    #[test]
    fn alpha_of_complete_graphs() {
        // ᾱ(K_n) = n/(n−1).
        for n in 3..=6 {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
            let g = unit(n, &pairs);
            let alpha = normalized_algebraic_connectivity(&g).unwrap();
            let expect = n as f64 / (n - 1) as f64;
            assert!((alpha - expect).abs() < 1e-9, "K{n}: {alpha} vs {expect}");
        }
    }

    #[test]
    fn alpha_of_path3_and_disconnected() {
        let p3 = unit(3, &[(0, 1), (1, 2)]);
        let alpha = normalized_algebraic_connectivity(&p3).unwrap();
        assert!((alpha - 1.0).abs() < 1e-9, "{alpha}");
        // Two disjoint edges: disconnected but no isolated vertex → exact 0.
        let disjoint = unit(4, &[(0, 1), (2, 3)]);
        assert_eq!(normalized_algebraic_connectivity(&disjoint).unwrap(), 0.0);
        // Isolated vertex → error.
        let isolated = unit(3, &[(0, 1)]);
        assert!(normalized_algebraic_connectivity(&isolated).is_err());
        assert!(normalized_algebraic_connectivity(&unit(1, &[])).is_err());
    }

    #[test]
    fn bisect_single_edge_and_triangle_pair() {
        let edge = unit(2, &[(0, 1)]);
        let (v1, v2) = fiedler_bisect(&edge).unwrap();
        assert_eq!(v1.len() + v2.len(), 2);
        assert!(!v1.is_empty() && !v2.is_empty());

        let g = two_triangles_bridged();
        let (v1, v2) = fiedler_bisect(&g).unwrap();
        let mut sides = [v1, v2];
        sides.sort();
        assert_eq!(sides[0], vec![0, 1, 2]);
        assert_eq!(sides[1], vec![3, 4, 5]);
    }

    #[test]
    fn bisect_star_is_nonempty_and_rejects_disconnected() {
        let star = unit(4, &[(0, 1), (0, 2), (0, 3)]);
        let (v1, v2) = fiedler_bisect(&star).unwrap();
        assert!(!v1.is_empty() && !v2.is_empty());
        let disjoint = unit(4, &[(0, 1), (2, 3)]);
        assert!(fiedler_bisect(&disjoint).is_err());
    }

    #[test]
    fn method_a_on_bridged_triangles() {
        let g = two_triangles_bridged();
        let report = method_a(&g).unwrap();
        assert_eq!(report.levels().len(), 6);
        for (i, level) in report.levels().iter().enumerate() {
            assert_eq!(level.k, i + 1);
        }
        let chosen = report.chosen();
        assert_eq!(chosen.k, 2);
        let clusters = chosen.clustering.clusters();
        assert_eq!(clusters[0], vec![0, 1, 2]);
        assert_eq!(clusters[1], vec![3, 4, 5]);
    }

    #[test]
    fn method_a_disconnected_components_level() {
        // Two disjoint unit triangles: level 2 = the components, q = 0.5.
        let g = unit(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let report = method_a(&g).unwrap();
        let level2 = &report.levels()[1];
        assert_eq!(level2.k, 2);
        assert_eq!(level2.clustering.clusters()[0], vec![0, 1, 2]);
        assert!((level2.q_s - 0.5).abs() < 1e-12);
        assert_eq!(report.chosen().k, 2);
    }

    #[test]
    fn method_a_single_vertex_reports_zero() {
        let g = unit(1, &[]);
        let report = method_a(&g).unwrap();
        assert_eq!(report.levels().len(), 1);
        assert_eq!(report.chosen().q_s, 0.0);
        assert!(!report.notes().is_empty());
    }

    #[test]
    fn dendrogram_levels_refine() {
        let g = two_triangles_bridged();
        let report = method_a(&g).unwrap();
        for pair in report.levels().windows(2) {
            let (prev, next) = (&pair[0], &pair[1]);
            assert_eq!(next.k, prev.k + 1);
            // Refinement: vertices sharing a cluster in `next` share one in `prev`.
            for u in 0..g.n() {
                for v in 0..g.n() {
                    if next.clustering.assignment()[u] == next.clustering.assignment()[v] {
                        assert_eq!(
                            prev.clustering.assignment()[u],
                            prev.clustering.assignment()[v]
                        );
                    }
                }
            }
        }
    }
}
