//! Dense symmetric eigendecomposition (cyclic Jacobi) and k-means.
//!
//! Jacobi is unconditionally stable and fully deterministic, which is what
//! matters at the orders seen here (n ≤ a few dozen); no attempt is made to
//! be fast on large matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::seed::derive_seed;

/// Eigenvalues ascending; eigenvector j (column j) pairs with eigenvalue j.
/// Every eigenvector is unit-norm with its first entry of magnitude > 1e-12
/// made positive, so repeated runs and permuted inputs produce comparable
/// vectors.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: SquareMatrix,
}

impl EigenDecomposition {
    /// Column `j` as a vector.
    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.eigenvectors.n()).map(|i| self.eigenvectors[(i, j)]).collect()
    }

    /// Index order for descending eigenvalues (largest first).
    pub fn descending(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.eigenvalues.len()).collect();
        idx.reverse();
        idx
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Rotations run in row-major upper-triangle order; iteration stops when the
/// off-diagonal Frobenius norm drops below 1e-12·‖M‖_F. Input asymmetry up to
/// 1e-12 is tolerated (and symmetrized away); anything worse is an error.
pub fn eig_symmetric(m: &SquareMatrix) -> Result<EigenDecomposition> {
    let n = m.n();
    if n == 0 {
        return Err(Error::Data("eigendecomposition of an empty matrix".into()));
    }
    if m.asymmetry() > 1e-12 {
        return Err(Error::Data(format!(
            "matrix is not symmetric (max |a_ij − a_ji| = {:.3e})",
            m.asymmetry()
        )));
    }
    let mut a = m.clone();
    a.symmetrize();
    let norm = a.frobenius_norm();
    let tol = 1e-12 * norm;
    let mut v = SquareMatrix::identity(n);

    let mut converged = norm == 0.0 || n == 1;
    for _ in 0..MAX_SWEEPS {
        if a.offdiag_norm() <= tol {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                // Classic two-sided rotation zeroing a_pq.
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        a[(r, p)] = c * arp - s * arq;
                        a[(p, r)] = a[(r, p)];
                        a[(r, q)] = s * arp + c * arq;
                        a[(q, r)] = a[(r, q)];
                    }
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }
    if !converged && a.offdiag_norm() > tol {
        return Err(Error::Numeric(format!(
            "Jacobi sweep limit ({MAX_SWEEPS}) hit; off-diagonal norm {:.3e} > {:.3e}",
            a.offdiag_norm(),
            tol
        )));
    }

    // Ascending eigenvalue order, stable in the original index on ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].partial_cmp(&a[(y, y)]).unwrap().then(x.cmp(&y)));
    let eigenvalues: Vec<f64> = order.iter().map(|&j| a[(j, j)]).collect();
    let mut eigenvectors = SquareMatrix::zeros(n);
    for (col, &j) in order.iter().enumerate() {
        // Canonical sign: first entry with magnitude above 1e-12 positive.
        let flip = (0..n)
            .map(|r| v[(r, j)])
            .find(|x| x.abs() > 1e-12)
            .is_some_and(|x| x < 0.0);
        for r in 0..n {
            eigenvectors[(r, col)] = if flip { -v[(r, j)] } else { v[(r, j)] };
        }
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

/// Output of one k-means run.
#[derive(Clone, Debug)]
pub struct KmeansResult {
    /// Per-point cluster label in `0..k` (labels are not canonicalized here;
    /// callers that need stable ids wrap this in a [`crate::graph::Clustering`]).
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squared distances.
    pub wcss: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm with squared-distance-weighted seeding, 50 restarts
/// (sub-seeds derived from `seed`), at most 100 iterations per restart.
/// The winner is the restart with the lowest WCSS; ties keep the earliest
/// restart, so the result is a pure function of (points, k, seed).
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KmeansResult> {
    let npts = points.len();
    if k == 0 || k > npts {
        return Err(Error::Config(format!("k = {k} outside 1..={npts}")));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::Config("points have mixed dimensionality".into()));
    }

    const RESTARTS: usize = 50;
    const MAX_ITERS: usize = 100;

    let mut best: Option<KmeansResult> = None;
    for restart in 0..RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[restart as u64]));

        // Seeding: first centroid uniform, the rest weighted by squared
        // distance to the nearest centroid chosen so far.
        let mut centroids: Vec<Vec<f64>> = vec![points[rng.gen_range(0..npts)].clone()];
        let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
        while centroids.len() < k {
            let total: f64 = d2.iter().sum();
            let pick = if total > 0.0 {
                let mut target = rng.gen::<f64>() * total;
                let mut chosen = npts - 1;
                for (i, &w) in d2.iter().enumerate() {
                    target -= w;
                    if target <= 0.0 {
                        chosen = i;
                        break;
                    }
                }
                chosen
            } else {
                rng.gen_range(0..npts)
            };
            centroids.push(points[pick].clone());
            for (i, p) in points.iter().enumerate() {
                d2[i] = d2[i].min(sq_dist(p, centroids.last().unwrap()));
            }
        }

        let mut assignment = vec![0usize; npts];
        for _ in 0..MAX_ITERS {
            // Assign: nearest centroid, lowest index on ties.
            let mut changed = false;
            for (i, p) in points.iter().enumerate() {
                let mut bestc = 0;
                let mut bestd = sq_dist(p, &centroids[0]);
                for (c, cent) in centroids.iter().enumerate().skip(1) {
                    let d = sq_dist(p, cent);
                    if d < bestd {
                        bestd = d;
                        bestc = c;
                    }
                }
                if assignment[i] != bestc {
                    assignment[i] = bestc;
                    changed = true;
                }
            }

            // Update; repair any emptied cluster from the farthest point.
            let mut counts = vec![0usize; k];
            let mut sums = vec![vec![0.0; dim]; k];
            for (i, p) in points.iter().enumerate() {
                counts[assignment[i]] += 1;
                for (s, x) in sums[assignment[i]].iter_mut().zip(p) {
                    *s += x;
                }
            }
            for c in 0..k {
                if counts[c] > 0 {
                    centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
                } else {
                    let far = (0..npts)
                        .max_by(|&x, &y| {
                            let dx = sq_dist(&points[x], &centroids[assignment[x]]);
                            let dy = sq_dist(&points[y], &centroids[assignment[y]]);
                            dx.partial_cmp(&dy).unwrap().then(x.cmp(&y))
                        })
                        .unwrap();
                    centroids[c] = points[far].clone();
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let wcss: f64 = points
            .iter()
            .enumerate()
            .map(|(i, p)| sq_dist(p, &centroids[assignment[i]]))
            .sum();
        if best.as_ref().is_none_or(|b| wcss < b.wcss) {
            best = Some(KmeansResult { assignment, centroids, wcss });
        }
    }
    Ok(best.unwrap())
}
