//! Modularity q and its signed extension q_s — the objective that every
//! detection method is scored by and that the annealing method climbs.
//!
//! Convention notes (they matter; get these wrong and the printed extremes
//! below are unreachable):
//!
//! * The mixing matrix counts intra-cluster mass once in `e_ii`, but
//!   inter-cluster mass goes **fully** into both `e_ij` and `e_ji`. Under
//!   this convention k equal disjoint components score q = 1 − 1/k and a
//!   bipartite graph clustered by its parts scores q = −2; halving the
//!   off-diagonal entries instead would give −1/2 for the bipartite case.
//! * "Edge count" generalizes to total edge weight throughout; a count-based
//!   m± mode is available for sensitivity checks.

use crate::error::{Error, Result};
use crate::graph::{Clustering, SignedGraph};
use crate::matrix::SquareMatrix;

/// How m⁺/m⁻ weigh the two sign classes in q_s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MassMode {
    /// Total edge weight per sign class (default).
    #[default]
    Weight,
    /// Number of edges per sign class.
    Count,
}

/// The k×k cluster mixing matrix E and its marginals.
#[derive(Clone, Debug)]
pub struct MixingMatrix {
    e: SquareMatrix,
}

impl MixingMatrix {
    pub fn k(&self) -> usize {
        self.e.n()
    }

    pub fn values(&self) -> &SquareMatrix {
        &self.e
    }

    /// Row sums a_i = Σ_j e_ij.
    pub fn marginals(&self) -> Vec<f64> {
        (0..self.k()).map(|i| self.e.row(i).iter().sum()).collect()
    }

    /// q = Σ_i (e_ii − a_i²).
    pub fn modularity_marginal(&self) -> f64 {
        self.marginals()
            .iter()
            .enumerate()
            .map(|(i, a)| self.e[(i, i)] - a * a)
            .sum()
    }

    /// q = tr(E) − ‖E²‖ where ‖·‖ sums all entries. Agrees with
    /// [`Self::modularity_marginal`] up to rounding; kept as a cross-check.
    pub fn modularity_trace(&self) -> f64 {
        self.e.trace() - self.e.matmul(&self.e).entry_sum()
    }
}

/// Builds the mixing matrix of an all-positive graph under a clustering.
/// Intra mass is counted once on the diagonal; inter mass appears in full in
/// both symmetric entries (see module docs).
pub fn mixing_matrix(g: &SignedGraph, c: &Clustering) -> Result<MixingMatrix> {
    if c.n() != g.n() {
        return Err(Error::Data(format!(
            "clustering covers {} vertices but the graph has {}",
            c.n(),
            g.n()
        )));
    }
    if g.edges().iter().any(|e| e.sign < 0) {
        return Err(Error::Data(
            "mixing matrix requires an all-positive graph; split signs first".into(),
        ));
    }
    if g.edge_count() == 0 {
        return Err(Error::Data("modularity of an empty graph is undefined".into()));
    }
    let total: f64 = g.total_weight();
    let assign = c.assignment();
    let mut e = SquareMatrix::zeros(c.k());
    for edge in g.edges() {
        let (a, b) = (assign[edge.i], assign[edge.j]);
        if a == b {
            e[(a, a)] += edge.w;
        } else {
            e[(a, b)] += edge.w;
            e[(b, a)] += edge.w;
        }
    }
    // Normalize once at the end: summing w/m per edge would smear rounding
    // error over every entry (and a whole-graph cluster must score exactly 0).
    for i in 0..c.k() {
        for j in 0..c.k() {
            e[(i, j)] /= total;
        }
    }
    Ok(MixingMatrix { e })
}

/// Girvan–Newman modularity of an all-positive graph.
pub fn girvan_newman_modularity(g: &SignedGraph, c: &Clustering) -> Result<f64> {
    Ok(mixing_matrix(g, c)?.modularity_marginal())
}

/// Signed modularity q_s = (m⁺q⁺ − m⁻q⁻)/(m⁺ + m⁻), weight-mode masses.
pub fn signed_modularity(g: &SignedGraph, c: &Clustering) -> Result<f64> {
    signed_modularity_with_mode(g, c, MassMode::Weight)
}

/// q_s with an explicit mass mode. An empty sign class contributes zero with
/// zero mass, so an all-positive graph reproduces plain q exactly.
pub fn signed_modularity_with_mode(
    g: &SignedGraph,
    c: &Clustering,
    mode: MassMode,
) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::Data("modularity of an empty graph is undefined".into()));
    }
    let (gp, gn) = g.split_signs();
    let mass = |part: &SignedGraph| -> f64 {
        match mode {
            MassMode::Weight => part.total_weight(),
            MassMode::Count => part.edge_count() as f64,
        }
    };
    let (mp, mn) = (mass(&gp), mass(&gn));
    let qp = if gp.edge_count() > 0 { girvan_newman_modularity(&gp, c)? } else { 0.0 };
    let qn = if gn.edge_count() > 0 { girvan_newman_modularity(&gn, c)? } else { 0.0 };
    Ok((mp * qp - mn * qn) / (mp + mn))
}

/// q_s, with the empty graph scored as 0 instead of an error. Detection
/// methods use this when scoring degenerate windows (a thresholded matrix can
/// come out edgeless); pipelines record the note separately.
pub fn signed_modularity_or_zero(g: &SignedGraph, c: &Clustering) -> f64 {
    signed_modularity(g, c).unwrap_or(0.0)
}
