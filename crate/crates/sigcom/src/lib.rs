//! Community structure in windowed multichannel recordings.
//!
//! A recording is cut into fixed-size windows; each window yields a pairwise
//! connectivity matrix (signed Pearson correlation, or band-averaged Welch
//! coherency), which is read as a weighted graph whose edges carry the
//! magnitude as weight and the sign separately. Four unsupervised methods
//! then produce a hierarchy of clusterings per window:
//!
//! * **A** — recursive bisection by the Laplacian's Fiedler vector,
//!   postponing well-connected clusters (by normalized algebraic
//!   connectivity),
//! * **B** — k-means on spectral coordinates of the signed adjacency,
//! * **C** — iterated removal of the highest-betweenness edge,
//! * **D** — hierarchical simulated annealing on signed modularity.
//!
//! Every hierarchy is scored level by level with a signed variant of
//! Girvan–Newman modularity, and the best level is the method's answer for
//! that window. [`pipeline::run_pipeline`] drives the whole thing and writes
//! cluster maps, modularity and anticorrelation traces, dendrograms and a
//! manifest; the `sigcom` binary wraps it in a CLI and bundles a synthetic
//! recording generator for sanity checks.
//!
//! All stochastic pieces (annealing, k-means restarts) draw from seeds
//! derived per (window, method), so results are reproducible bit for bit
//! independent of thread count.

// Index-based loops are used throughout the numeric code where the index is
// shared between several matrices; iterator rewrites obscure that.
#![allow(clippy::needless_range_loop)]

pub mod anneal;
pub mod betweenness;
pub mod connectivity;
pub mod error;
pub mod fiedler;
pub mod graph;
pub mod linalg;
pub mod matrix;
pub mod modularity;
pub mod pipeline;
pub mod plot;
pub mod report;
pub mod seed;
pub mod signal;
pub mod spectral;

pub use error::{Error, Result};
