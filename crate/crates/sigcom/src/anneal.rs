//! Method D: hierarchical simulated-annealing bisection driven by signed
//! modularity. Each split anneals a two-coloring of one cluster while every
//! other cluster stays frozen; the objective is the global q_s of the whole
//! clustering, evaluated in O(1) per proposal via incremental side weights
//! (the annealer tries ~10⁸ proposals per window, so this matters).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Clustering, SignedGraph};
use crate::modularity::signed_modularity_or_zero;
use crate::report::{Level, MethodId, MethodReport, SplitInfo};
use crate::seed::derive_seed;

/// Geometric cooling schedule: `temp_steps` temperature levels from
/// `t_initial` down to `t_final`, `samples_per_temp` proposals at each.
#[derive(Clone, Copy, Debug)]
pub struct AnnealingSchedule {
    pub temp_steps: usize,
    pub samples_per_temp: usize,
    pub t_initial: f64,
    pub t_final: f64,
}

impl Default for AnnealingSchedule {
    fn default() -> Self {
        AnnealingSchedule {
            temp_steps: 400,
            samples_per_temp: 500,
            t_initial: 1.0,
            t_final: 1e-3,
        }
    }
}

impl AnnealingSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.temp_steps == 0 || self.samples_per_temp == 0 {
            return Err(Error::Config(
                "annealing needs at least one temperature step and one sample".into(),
            ));
        }
        let ok = self.t_initial.is_finite()
            && self.t_final.is_finite()
            && self.t_final > 0.0
            && self.t_final < self.t_initial;
        if !ok {
            return Err(Error::Config(format!(
                "temperatures must satisfy 0 < t_final < t_initial, got {} .. {}",
                self.t_final, self.t_initial
            )));
        }
        Ok(())
    }

    fn decay(&self) -> f64 {
        (self.t_final / self.t_initial).powf(1.0 / self.temp_steps as f64)
    }
}

/// How many 2-partitions the hierarchical bisection search visits, bracketed
/// between the perfectly balanced and the peel-one-vertex extremes, next to
/// the Bell number it replaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchSpaceSizes {
    pub n: usize,
    pub bell_reference: u128,
    pub best_case: u128,
    pub worst_case: u128,
}

/// Exact counts for an n-vertex hierarchy. Capped at n = 40 where the Bell
/// number still fits u128 comfortably.
pub fn hierarchical_search_space(n: usize) -> Result<SearchSpaceSizes> {
    if n < 2 {
        return Err(Error::Config(format!("search space needs n >= 2, got {n}")));
    }
    if n > 40 {
        return Err(Error::Config(format!(
            "search space capped at n = 40 (Bell numbers overflow beyond), got {n}"
        )));
    }
    // Bell triangle: each row starts with the previous row's last entry.
    let mut row: Vec<u128> = vec![1];
    for _ in 1..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    let bell_reference = *row.last().unwrap();

    // Balanced halving: a size-s cluster offers 2^(s−1) − 1 bipartitions.
    let mut best_case = 0u128;
    let mut k = 0;
    loop {
        let size = n >> k;
        if size < 2 {
            break;
        }
        best_case += (1u128 << (size - 1)) - 1;
        k += 1;
    }
    let worst_case = (1u128 << n) - 1 - n as u128;
    Ok(SearchSpaceSizes { n, bell_reference, best_case, worst_case })
}

/// Result of annealing one cluster's bisection: the two sides (the one
/// holding the cluster's smallest vertex first), the exact q_s of the full
/// clustering with this split applied, and the per-temperature best trace.
#[derive(Clone, Debug)]
pub struct SaOutcome {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub q_s: f64,
    pub trace: Vec<f64>,
}

/// Incremental bookkeeping for a two-sided split of one cluster, everything
/// else frozen. Global q_s decomposes into a constant (frozen clusters'
/// mixing terms — constant because the mass they exchange with the union of
/// both sides never changes) plus terms driven by six per-side aggregates.
struct SplitState {
    side: Vec<u8>,
    sizes: [usize; 2],
    /// nbrs[idx] = (other local idx, weight, sign) within the cluster.
    nbrs: Vec<Vec<(usize, f64, i8)>>,
    /// pos_to[s][idx]: positive weight from member idx to side s.
    pos_to: [Vec<f64>; 2],
    neg_to: [Vec<f64>; 2],
    out_pos: Vec<f64>,
    out_neg: Vec<f64>,
    intra_pos: [f64; 2],
    intra_neg: [f64; 2],
    cross_pos: f64,
    cross_neg: f64,
    out_side_pos: [f64; 2],
    out_side_neg: [f64; 2],
    m_pos: f64,
    m_neg: f64,
    const_pos: f64,
    const_neg: f64,
}

struct MoveDelta {
    idx: usize,
    intra_pos: [f64; 2],
    intra_neg: [f64; 2],
    cross_pos: f64,
    cross_neg: f64,
    out_side_pos: [f64; 2],
    out_side_neg: [f64; 2],
}

impl SplitState {
    fn new(g: &SignedGraph, context: &Clustering, cluster_id: usize, side: Vec<u8>) -> Self {
        let clusters = context.clusters();
        let members = &clusters[cluster_id];
        let m = members.len();
        let mut local = vec![usize::MAX; g.n()];
        for (idx, &v) in members.iter().enumerate() {
            local[v] = idx;
        }
        let asg = context.assignment();
        let k = context.k();

        let mut nbrs: Vec<Vec<(usize, f64, i8)>> = vec![Vec::new(); m];
        let mut out_pos = vec![0.0; m];
        let mut out_neg = vec![0.0; m];
        let mut frozen_intra_pos = vec![0.0; k];
        let mut frozen_intra_neg = vec![0.0; k];
        let mut frozen_inter_pos = vec![0.0; k];
        let mut frozen_inter_neg = vec![0.0; k];
        let mut m_pos = 0.0;
        let mut m_neg = 0.0;
        let mut internal: Vec<(usize, usize, f64, i8)> = Vec::new();

        for e in g.edges() {
            let positive = e.sign > 0;
            if positive {
                m_pos += e.w;
            } else {
                m_neg += e.w;
            }
            let (cu, cv) = (asg[e.i], asg[e.j]);
            match (cu == cluster_id, cv == cluster_id) {
                (true, true) => {
                    let (lu, lv) = (local[e.i], local[e.j]);
                    nbrs[lu].push((lv, e.w, e.sign));
                    nbrs[lv].push((lu, e.w, e.sign));
                    internal.push((lu, lv, e.w, e.sign));
                }
                (true, false) | (false, true) => {
                    let (lm, cf) = if cu == cluster_id { (local[e.i], cv) } else { (local[e.j], cu) };
                    if positive {
                        out_pos[lm] += e.w;
                        frozen_inter_pos[cf] += e.w;
                    } else {
                        out_neg[lm] += e.w;
                        frozen_inter_neg[cf] += e.w;
                    }
                }
                (false, false) => {
                    if cu == cv {
                        if positive {
                            frozen_intra_pos[cu] += e.w;
                        } else {
                            frozen_intra_neg[cu] += e.w;
                        }
                    } else if positive {
                        frozen_inter_pos[cu] += e.w;
                        frozen_inter_pos[cv] += e.w;
                    } else {
                        frozen_inter_neg[cu] += e.w;
                        frozen_inter_neg[cv] += e.w;
                    }
                }
            }
        }

        let frozen_terms = |intra: &[f64], inter: &[f64], mass: f64| -> f64 {
            if mass == 0.0 {
                return 0.0;
            }
            (0..k)
                .filter(|&c| c != cluster_id)
                .map(|c| {
                    let e_cc = intra[c] / mass;
                    let a_c = (intra[c] + inter[c]) / mass;
                    e_cc - a_c * a_c
                })
                .sum()
        };
        let const_pos = frozen_terms(&frozen_intra_pos, &frozen_inter_pos, m_pos);
        let const_neg = frozen_terms(&frozen_intra_neg, &frozen_inter_neg, m_neg);

        let mut state = SplitState {
            side,
            sizes: [0, 0],
            nbrs,
            pos_to: [vec![0.0; m], vec![0.0; m]],
            neg_to: [vec![0.0; m], vec![0.0; m]],
            out_pos,
            out_neg,
            intra_pos: [0.0; 2],
            intra_neg: [0.0; 2],
            cross_pos: 0.0,
            cross_neg: 0.0,
            out_side_pos: [0.0; 2],
            out_side_neg: [0.0; 2],
            m_pos,
            m_neg,
            const_pos,
            const_neg,
        };
        for idx in 0..m {
            let s = state.side[idx] as usize;
            state.sizes[s] += 1;
            state.out_side_pos[s] += state.out_pos[idx];
            state.out_side_neg[s] += state.out_neg[idx];
        }
        for &(lu, lv, w, sign) in &internal {
            let (su, sv) = (state.side[lu] as usize, state.side[lv] as usize);
            if sign > 0 {
                state.pos_to[sv][lu] += w;
                state.pos_to[su][lv] += w;
                if su == sv {
                    state.intra_pos[su] += w;
                } else {
                    state.cross_pos += w;
                }
            } else {
                state.neg_to[sv][lu] += w;
                state.neg_to[su][lv] += w;
                if su == sv {
                    state.intra_neg[su] += w;
                } else {
                    state.cross_neg += w;
                }
            }
        }
        state
    }

    fn q_s_from(
        &self,
        intra_pos: [f64; 2],
        cross_pos: f64,
        out_side_pos: [f64; 2],
        intra_neg: [f64; 2],
        cross_neg: f64,
        out_side_neg: [f64; 2],
    ) -> f64 {
        let total = self.m_pos + self.m_neg;
        if total == 0.0 {
            return 0.0;
        }
        let mut numerator = 0.0;
        if self.m_pos > 0.0 {
            let mut q = self.const_pos;
            for s in 0..2 {
                let e_ss = intra_pos[s] / self.m_pos;
                let a_s = (intra_pos[s] + cross_pos + out_side_pos[s]) / self.m_pos;
                q += e_ss - a_s * a_s;
            }
            numerator += self.m_pos * q;
        }
        if self.m_neg > 0.0 {
            let mut q = self.const_neg;
            for s in 0..2 {
                let e_ss = intra_neg[s] / self.m_neg;
                let a_s = (intra_neg[s] + cross_neg + out_side_neg[s]) / self.m_neg;
                q += e_ss - a_s * a_s;
            }
            numerator -= self.m_neg * q;
        }
        numerator / total
    }

    fn q_current(&self) -> f64 {
        self.q_s_from(
            self.intra_pos,
            self.cross_pos,
            self.out_side_pos,
            self.intra_neg,
            self.cross_neg,
            self.out_side_neg,
        )
    }

    /// Evaluates moving member `idx` to the other side without committing.
    fn propose(&self, idx: usize) -> (f64, MoveDelta) {
        let a = self.side[idx] as usize;
        let b = 1 - a;
        let (dp, gp) = (self.pos_to[a][idx], self.pos_to[b][idx]);
        let (dn, gn) = (self.neg_to[a][idx], self.neg_to[b][idx]);
        let mut delta = MoveDelta {
            idx,
            intra_pos: self.intra_pos,
            intra_neg: self.intra_neg,
            cross_pos: self.cross_pos + dp - gp,
            cross_neg: self.cross_neg + dn - gn,
            out_side_pos: self.out_side_pos,
            out_side_neg: self.out_side_neg,
        };
        delta.intra_pos[a] -= dp;
        delta.intra_pos[b] += gp;
        delta.intra_neg[a] -= dn;
        delta.intra_neg[b] += gn;
        delta.out_side_pos[a] -= self.out_pos[idx];
        delta.out_side_pos[b] += self.out_pos[idx];
        delta.out_side_neg[a] -= self.out_neg[idx];
        delta.out_side_neg[b] += self.out_neg[idx];
        let q = self.q_s_from(
            delta.intra_pos,
            delta.cross_pos,
            delta.out_side_pos,
            delta.intra_neg,
            delta.cross_neg,
            delta.out_side_neg,
        );
        (q, delta)
    }

    fn commit(&mut self, delta: MoveDelta) {
        let idx = delta.idx;
        let a = self.side[idx] as usize;
        let b = 1 - a;
        self.intra_pos = delta.intra_pos;
        self.intra_neg = delta.intra_neg;
        self.cross_pos = delta.cross_pos;
        self.cross_neg = delta.cross_neg;
        self.out_side_pos = delta.out_side_pos;
        self.out_side_neg = delta.out_side_neg;
        self.side[idx] = b as u8;
        self.sizes[a] -= 1;
        self.sizes[b] += 1;
        for &(o, w, sign) in &self.nbrs[idx] {
            if sign > 0 {
                self.pos_to[a][o] -= w;
                self.pos_to[b][o] += w;
            } else {
                self.neg_to[a][o] -= w;
                self.neg_to[b][o] += w;
            }
        }
    }
}

/// Anneals a bisection of cluster `cluster_id` of `context`, scoring every
/// state by the global q_s with all other clusters frozen. Deterministic
/// given the seed; the returned q_s is recomputed exactly from the best
/// assignment (the incremental aggregates drift by rounding over ~10⁵
/// accepted moves, so the search runs on them but the report does not).
pub fn sa_bisect(
    g: &SignedGraph,
    context: &Clustering,
    cluster_id: usize,
    schedule: &AnnealingSchedule,
    seed: u64,
) -> Result<SaOutcome> {
    schedule.validate()?;
    if context.n() != g.n() {
        return Err(Error::Config(format!(
            "clustering covers {} vertices, graph has {}",
            context.n(),
            g.n()
        )));
    }
    if cluster_id >= context.k() {
        return Err(Error::Config(format!(
            "cluster {cluster_id} out of range (k = {})",
            context.k()
        )));
    }
    let members = context.clusters()[cluster_id].clone();
    let m = members.len();
    if m < 2 {
        return Err(Error::Config(format!(
            "cluster {cluster_id} has {m} vertex(es); need at least 2 to split"
        )));
    }

    let finish = |left_side: u8, side: &[u8], trace: Vec<f64>| -> Result<SaOutcome> {
        let left: Vec<usize> = members
            .iter()
            .zip(side)
            .filter(|(_, &s)| s == left_side)
            .map(|(&v, _)| v)
            .collect();
        let right: Vec<usize> = members
            .iter()
            .zip(side)
            .filter(|(_, &s)| s != left_side)
            .map(|(&v, _)| v)
            .collect();
        let clustering = context.split_cluster(cluster_id, &left, &right)?;
        let q_s = signed_modularity_or_zero(g, &clustering);
        Ok(SaOutcome { left, right, q_s, trace })
    };

    if m == 2 {
        // Only one bipartition exists; nothing to anneal.
        return finish(0, &[0, 1], Vec::new());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = loop {
        let candidate: Vec<u8> = (0..m).map(|_| rng.gen_range(0..2u8)).collect();
        let ones = candidate.iter().filter(|&&s| s == 1).count();
        if ones > 0 && ones < m {
            break candidate;
        }
    };
    let mut state = SplitState::new(g, context, cluster_id, side);
    let mut q_cur = state.q_current();
    let mut best_q = q_cur;
    let mut best_side = state.side.clone();
    let mut trace = Vec::with_capacity(schedule.temp_steps);
    let decay = schedule.decay();
    let mut t = schedule.t_initial;
    for _ in 0..schedule.temp_steps {
        for _ in 0..schedule.samples_per_temp {
            let idx = loop {
                let candidate = rng.gen_range(0..m);
                if state.sizes[state.side[candidate] as usize] > 1 {
                    break candidate;
                }
            };
            let (q_cand, delta) = state.propose(idx);
            let accept = if q_cand > q_cur {
                true
            } else {
                let u: f64 = rng.gen();
                u < ((q_cand - q_cur) / t).exp()
            };
            if accept {
                state.commit(delta);
                q_cur = q_cand;
                if q_cur > best_q {
                    best_q = q_cur;
                    best_side.copy_from_slice(&state.side);
                }
            }
        }
        trace.push(best_q);
        t *= decay;
    }
    finish(best_side[0], &best_side, trace)
}

/// Annealing traces of the committed splits, one entry per level that grew
/// the partition: (resulting cluster count, best q_s after each temperature).
pub type LevelTraces = Vec<(usize, Vec<f64>)>;

/// The full hierarchical method: at each level, trial-split every cluster of
/// size ≥ 2 (sub-seeds derived from the level and the cluster's smallest
/// vertex), commit the split with the highest q_s (ties: the cluster with
/// the smallest vertex), stop at min(8, n) clusters. Returns the report and
/// the committed splits' annealing traces.
pub fn method_d(
    g: &SignedGraph,
    schedule: &AnnealingSchedule,
    seed: u64,
) -> Result<(MethodReport, LevelTraces)> {
    schedule.validate()?;
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
    let mut traces = Vec::new();
    let cap = 8.min(g.n());
    while current.k() < cap {
        let clusters = current.clusters();
        let mut best: Option<(usize, SaOutcome)> = None;
        for (id, members) in clusters.iter().enumerate() {
            if members.len() < 2 {
                continue;
            }
            let sub_seed = derive_seed(seed, &[current.k() as u64, members[0] as u64]);
            let outcome = sa_bisect(g, &current, id, schedule, sub_seed)?;
            let better = match &best {
                None => true,
                Some((_, cur)) => outcome.q_s > cur.q_s,
            };
            if better {
                best = Some((id, outcome));
            }
        }
        let Some((id, outcome)) = best else {
            break; // nothing left to split
        };
        current = current.split_cluster(id, &outcome.left, &outcome.right)?;
        let split = SplitInfo {
            parent: id,
            child_a: current.assignment()[outcome.left[0]],
            child_b: current.assignment()[outcome.right[0]],
        };
        levels.push(Level {
            k: current.k(),
            clustering: current.clone(),
            split: Some(split),
            q_s: outcome.q_s,
        });
        traces.push((current.k(), outcome.trace));
    }
    Ok((MethodReport::new(MethodId::D, levels, notes), traces))
}
