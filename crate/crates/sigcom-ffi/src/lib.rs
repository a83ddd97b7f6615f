//! C interface to the connectivity-graph clustering library.
//!
//! Conventions, shared by every function here:
//! - Every fallible call returns a status code: 0 on success, otherwise one
//!   of the `SIGCOM_ERR_*` constants. Results travel through out-pointers,
//!   written only on success.
//! - A nonzero status leaves a message retrievable with
//!   [`sigcom_last_error_message`]. The message is thread-local and valid
//!   until the next failing call on the same thread.
//! - Handles (`SigcomGraph`, `SigcomReport`) are opaque; free them with the
//!   matching `*_free` function. Freeing a null handle is a no-op.
//! - Panics never unwind across the boundary; they are caught and reported
//!   as `SIGCOM_ERR_NUMERIC` with an `internal error:` message.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sigcom::anneal::{hierarchical_search_space, method_d, AnnealingSchedule};
use sigcom::betweenness::{method_c, EdgeLengthMode};
use sigcom::connectivity::{anticorrelation_index, AnticorrMode, ConnectivityMatrix, MatrixKind};
use sigcom::error::Error;
use sigcom::fiedler::method_a;
use sigcom::graph::{Clustering, SignedGraph};
use sigcom::matrix::SquareMatrix;
use sigcom::modularity::signed_modularity;
use sigcom::report::MethodReport;
use sigcom::spectral::{method_b, DEFAULT_K_MAX};

/// Success.
pub const SIGCOM_OK: i32 = 0;
/// Invalid configuration or argument (bad threshold, label count, method id…).
pub const SIGCOM_ERR_CONFIG: i32 = 2;
/// Input data failed validation (non-finite, asymmetric, empty…).
pub const SIGCOM_ERR_DATA: i32 = 3;
/// A numeric routine failed or an internal invariant broke.
pub const SIGCOM_ERR_NUMERIC: i32 = 4;
/// A required pointer argument was null.
pub const SIGCOM_ERR_NULL: i32 = 5;

/// Fiedler-vector bisection, postponing by normalized algebraic connectivity.
pub const SIGCOM_METHOD_A: i32 = 0;
/// Spectral coordinates of the signed adjacency, clustered with k-means.
pub const SIGCOM_METHOD_B: i32 = 1;
/// Edge-betweenness removal with inverse-weight path lengths.
pub const SIGCOM_METHOD_C: i32 = 2;
/// Hierarchical simulated annealing on signed modularity.
pub const SIGCOM_METHOD_D: i32 = 3;

/// Anticorrelation index: negative weight mass over total weight mass.
pub const SIGCOM_ANTICORR_WEIGHTED: i32 = 0;
/// Anticorrelation index: negative edge count over total edge count.
pub const SIGCOM_ANTICORR_COUNT: i32 = 1;

/// A signed graph built from one connectivity matrix.
pub struct SigcomGraph {
    matrix: ConnectivityMatrix,
    graph: SignedGraph,
}

/// One method's dendrogram: scored levels plus the index of the chosen one.
pub struct SigcomReport {
    report: MethodReport,
    n_vertices: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg)
        .unwrap_or_else(|_| CString::new("error message contained a nul byte").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> i32 {
    let code = e.exit_code();
    set_error(e.to_string());
    code
}

fn fail_null(what: &str) -> i32 {
    set_error(format!("{what} must not be null"));
    SIGCOM_ERR_NULL
}

fn fail_config(msg: String) -> i32 {
    set_error(msg);
    SIGCOM_ERR_CONFIG
}

/// Runs `f`, converting a panic into `SIGCOM_ERR_NUMERIC`. Nothing is reused
/// after a panic — every wrapper returns immediately — so the unwind-safety
/// assertion is sound.
fn guarded(f: impl FnOnce() -> i32) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(format!("internal error: {msg}"));
            SIGCOM_ERR_NUMERIC
        }
    }
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn sigcom_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the most recent failure on this thread, or null if no call has
/// failed yet. The pointer is invalidated by the next failing call.
#[no_mangle]
pub extern "C" fn sigcom_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(msg) => msg.as_ptr(),
        None => std::ptr::null(),
    })
}

/// Builds a signed graph from an `n * n` row-major symmetric matrix of
/// correlation values in [-1, 1]. The diagonal is ignored; off-diagonal
/// entries with |value| <= threshold are dropped, the rest become edges with
/// weight |value| and the value's sign.
///
/// # Safety
/// `values` must point to `n * n` readable doubles; `out` must be a valid
/// destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn sigcom_graph_from_matrix(
    values: *const f64,
    n: usize,
    threshold: f64,
    out: *mut *mut SigcomGraph,
) -> i32 {
    guarded(|| {
        if values.is_null() {
            return fail_null("values");
        }
        if out.is_null() {
            return fail_null("out");
        }
        let Some(len) = n.checked_mul(n) else {
            return fail_config(format!("matrix order {n} overflows"));
        };
        let m = SquareMatrix::from_row_major(n, unsafe {
            std::slice::from_raw_parts(values, len).to_vec()
        });
        let built = ConnectivityMatrix::from_values(MatrixKind::Correlation, 0, m)
            .and_then(|cm| SignedGraph::from_connectivity(&cm, threshold).map(|g| (cm, g)));
        match built {
            Ok((matrix, graph)) => {
                unsafe { *out = Box::into_raw(Box::new(SigcomGraph { matrix, graph })) };
                SIGCOM_OK
            }
            Err(e) => fail(e),
        }
    })
}

/// Frees a graph handle. Null is allowed.
///
/// # Safety
/// `g` must be a pointer returned by [`sigcom_graph_from_matrix`] that has
/// not been freed yet, or null.
#[no_mangle]
pub unsafe extern "C" fn sigcom_graph_free(g: *mut SigcomGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// Number of vertices.
///
/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sigcom_graph_order(g: *const SigcomGraph, out: *mut usize) -> i32 {
    guarded(|| {
        if g.is_null() {
            return fail_null("graph");
        }
        if out.is_null() {
            return fail_null("out");
        }
        unsafe { *out = (*g).graph.n() };
        SIGCOM_OK
    })
}

/// Number of edges that survived the threshold.
///
/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sigcom_graph_edge_count(g: *const SigcomGraph, out: *mut usize) -> i32 {
    guarded(|| {
        if g.is_null() {
            return fail_null("graph");
        }
        if out.is_null() {
            return fail_null("out");
        }
        unsafe { *out = (*g).graph.edge_count() };
        SIGCOM_OK
    })
}

/// Anticorrelation index of the underlying matrix; `mode` is one of the
/// `SIGCOM_ANTICORR_*` constants.
///
/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sigcom_anticorrelation_index(
    g: *const SigcomGraph,
    mode: i32,
    out: *mut f64,
) -> i32 {
    guarded(|| {
        if g.is_null() {
            return fail_null("graph");
        }
        if out.is_null() {
            return fail_null("out");
        }
        let mode = match mode {
            SIGCOM_ANTICORR_WEIGHTED => AnticorrMode::Weighted,
            SIGCOM_ANTICORR_COUNT => AnticorrMode::Count,
            other => return fail_config(format!("unknown anticorrelation mode {other}")),
        };
        match anticorrelation_index(unsafe { &(*g).matrix }, mode) {
            Ok(a) => {
                unsafe { *out = a };
                SIGCOM_OK
            }
            Err(e) => fail(e),
        }
    })
}

/// Signed modularity of a vertex labeling. `labels` holds one cluster label
/// per vertex (arbitrary values; equal label means same cluster).
///
/// # Safety
/// `g` must be a live graph handle; `labels` must point to `n_labels`
/// readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sigcom_signed_modularity(
    g: *const SigcomGraph,
    labels: *const u32,
    n_labels: usize,
    out: *mut f64,
) -> i32 {
    guarded(|| {
        if g.is_null() {
            return fail_null("graph");
        }
        if labels.is_null() {
            return fail_null("labels");
        }
        if out.is_null() {
            return fail_null("out");
        }
        let graph = unsafe { &(*g).graph };
        if n_labels != graph.n() {
            return fail_config(format!(
                "got {n_labels} labels for a graph on {} vertices",
                graph.n()
            ));
        }
        let raw: Vec<usize> =
            unsafe { std::slice::from_raw_parts(labels, n_labels) }.iter().map(|&l| l as usize).collect();
        let clustering = Clustering::from_assignment(raw);
        match signed_modularity(graph, &clustering) {
            Ok(q) => {
                unsafe { *out = q };
                SIGCOM_OK
            }
            Err(e) => fail(e),
        }
    })
}

/// Runs one community-detection method; `method` is one of the
/// `SIGCOM_METHOD_*` constants. `seed` feeds the methods that randomize
/// (B and D) and is ignored by the deterministic ones.
///
/// # Safety
/// `g` must be a live graph handle; `out` must be a valid destination for
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn sigcom_run_method(
    g: *const SigcomGraph,
    method: i32,
    seed: u64,
    out: *mut *mut SigcomReport,
) -> i32 {
    guarded(|| {
        if g.is_null() {
            return fail_null("graph");
        }
        if out.is_null() {
            return fail_null("out");
        }
        let graph = unsafe { &(*g).graph };
        let result = match method {
            SIGCOM_METHOD_A => method_a(graph),
            SIGCOM_METHOD_B => method_b(graph, DEFAULT_K_MAX, seed),
            SIGCOM_METHOD_C => method_c(graph, EdgeLengthMode::InverseWeight).map(|(r, _)| r),
            SIGCOM_METHOD_D => {
                method_d(graph, &AnnealingSchedule::default(), seed).map(|(r, _)| r)
            }
            other => return fail_config(format!("unknown method {other}")),
        };
        match result {
            Ok(report) => {
                let boxed = Box::new(SigcomReport { report, n_vertices: graph.n() });
                unsafe { *out = Box::into_raw(boxed) };
                SIGCOM_OK
            }
            Err(e) => fail(e),
        }
    })
}

/// Frees a report handle. Null is allowed.
///
/// # Safety
/// `r` must be a pointer returned by [`sigcom_run_method`] that has not been
/// freed yet, or null.
#[no_mangle]
pub unsafe extern "C" fn sigcom_report_free(r: *mut SigcomReport) {
    if !r.is_null() {
        drop(unsafe { Box::from_raw(r) });
    }
}

/// Number of dendrogram levels in the report.
///
/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sigcom_report_level_count(
    r: *const SigcomReport,
    out: *mut usize,
) -> i32 {
    guarded(|| {
        if r.is_null() {
            return fail_null("report");
        }
        if out.is_null() {
            return fail_null("out");
        }
        unsafe { *out = (*r).report.levels().len() };
        SIGCOM_OK
    })
}

/// Index of the chosen level (maximum signed modularity; ties go to the
/// level with fewer clusters).
///
/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sigcom_report_chosen_level(
    r: *const SigcomReport,
    out: *mut usize,
) -> i32 {
    guarded(|| {
        if r.is_null() {
            return fail_null("report");
        }
        if out.is_null() {
            return fail_null("out");
        }
        unsafe { *out = (*r).report.chosen_index() };
        SIGCOM_OK
    })
}

fn level_of(r: &SigcomReport, level: usize) -> Result<&sigcom::report::Level, String> {
    r.report
        .levels()
        .get(level)
        .ok_or_else(|| format!("level {level} out of range ({} levels)", r.report.levels().len()))
}

/// Cluster count of one level.
///
/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sigcom_report_level_k(
    r: *const SigcomReport,
    level: usize,
    out: *mut usize,
) -> i32 {
    guarded(|| {
        if r.is_null() {
            return fail_null("report");
        }
        if out.is_null() {
            return fail_null("out");
        }
        match level_of(unsafe { &*r }, level) {
            Ok(l) => {
                unsafe { *out = l.k };
                SIGCOM_OK
            }
            Err(msg) => fail_config(msg),
        }
    })
}

/// Signed modularity of one level.
///
/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sigcom_report_level_modularity(
    r: *const SigcomReport,
    level: usize,
    out: *mut f64,
) -> i32 {
    guarded(|| {
        if r.is_null() {
            return fail_null("report");
        }
        if out.is_null() {
            return fail_null("out");
        }
        match level_of(unsafe { &*r }, level) {
            Ok(l) => {
                unsafe { *out = l.q_s };
                SIGCOM_OK
            }
            Err(msg) => fail_config(msg),
        }
    })
}

/// Writes one level's vertex labeling (0-based cluster ids, one per vertex)
/// into `labels_out`. `capacity` is the writable length of `labels_out` and
/// must be at least the vertex count.
///
/// # Safety
/// `r` must be a live report handle; `labels_out` must point to `capacity`
/// writable values.
#[no_mangle]
pub unsafe extern "C" fn sigcom_report_level_assignment(
    r: *const SigcomReport,
    level: usize,
    labels_out: *mut u32,
    capacity: usize,
) -> i32 {
    guarded(|| {
        if r.is_null() {
            return fail_null("report");
        }
        if labels_out.is_null() {
            return fail_null("labels_out");
        }
        let report = unsafe { &*r };
        if capacity < report.n_vertices {
            return fail_config(format!(
                "capacity {capacity} is below the vertex count {}",
                report.n_vertices
            ));
        }
        match level_of(report, level) {
            Ok(l) => {
                let assignment = l.clustering.assignment();
                for (i, &label) in assignment.iter().enumerate() {
                    unsafe { *labels_out.add(i) = label as u32 };
                }
                SIGCOM_OK
            }
            Err(msg) => fail_config(msg),
        }
    })
}

/// Size of the search space a divisive hierarchy explores on `n` vertices:
/// the best case (every split lands immediately), the worst case (splits
/// peel one vertex at a time), and the exhaustive reference (the number of
/// all partitions). Fails for `n > 25`, where the reference count no longer
/// fits in 64 bits.
///
/// # Safety
/// The three out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sigcom_search_space(
    n: usize,
    best_out: *mut u64,
    worst_out: *mut u64,
    exhaustive_out: *mut u64,
) -> i32 {
    guarded(|| {
        if best_out.is_null() {
            return fail_null("best_out");
        }
        if worst_out.is_null() {
            return fail_null("worst_out");
        }
        if exhaustive_out.is_null() {
            return fail_null("exhaustive_out");
        }
        let sizes = match hierarchical_search_space(n) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        let (Ok(best), Ok(worst), Ok(exhaustive)) = (
            u64::try_from(sizes.best_case),
            u64::try_from(sizes.worst_case),
            u64::try_from(sizes.bell_reference),
        ) else {
            return fail_config(format!("counts for n = {n} exceed the 64-bit interface"));
        };
        unsafe {
            *best_out = best;
            *worst_out = worst;
            *exhaustive_out = exhaustive;
        }
        SIGCOM_OK
    })
}
