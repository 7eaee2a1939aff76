//! C ABI for the weyltree library.
//!
//! Conventions:
//! * handles (`WtTree`, `WtWeyl`) are opaque; create them with the `wt_*`
//!   constructors and release them with the matching `wt_*_free`;
//! * every fallible call returns a [`WtStatus`]; on anything other than
//!   `WT_STATUS_OK` a human-readable message is available from
//!   [`wt_last_error`] until the next `wt_` call on the same thread;
//! * complex numbers cross the boundary as interleaved `re, im` doubles in
//!   row-major order;
//! * handles are immutable after construction, so sharing them across
//!   threads for concurrent reads is safe.

use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use weyltree::{
    apply_dtn, compare, dirichlet_scan, direct_weyl, parse_graph, synthesize, BoundaryData,
    MetricTree, ScanOptions, SolverOptions, SpectralParameter, VertexId, WeylError, WeylMatrix,
};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    ParseError = 3,
    ValidationError = 4,
    /// lambda sits on (or numerically too close to) a Dirichlet eigenvalue
    /// of the tree or of an intermediate subtree.
    Singular = 5,
    DimensionMismatch = 6,
    IoError = 7,
    /// An internal invariant failed; the handle is still valid.
    Panic = 8,
}

/// A parsed and validated metric tree.
pub struct WtTree {
    inner: MetricTree,
}

/// A Weyl matrix together with the smallest reciprocal-condition estimate
/// met while computing it.
pub struct WtWeyl {
    matrix: WeylMatrix,
    min_rcond: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn clear_error() {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::default();
    });
}

fn status_of(error: &WeylError) -> WtStatus {
    match error {
        WeylError::DirichletEigenvalue { .. }
        | WeylError::SingularStep { .. }
        | WeylError::StepResidual { .. }
        | WeylError::SingularSystem { .. } => WtStatus::Singular,
        WeylError::DimensionMismatch(_) => WtStatus::DimensionMismatch,
        WeylError::LeafMismatch(_) | WeylError::InvalidInput(_) | WeylError::Solver(_) => {
            WtStatus::InvalidArgument
        }
        WeylError::InvalidTree(_) => WtStatus::ValidationError,
    }
}

fn guard(body: impl FnOnce() -> WtStatus) -> WtStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal panic".into());
            set_error(&message);
            WtStatus::Panic
        }
    }
}

/// Message of the most recent failure on this thread. Never null; empty
/// when the last call succeeded. Valid until the next `wt_` call on the
/// same thread.
#[no_mangle]
pub extern "C" fn wt_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn wt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn read_c_str<'a>(ptr: *const c_char) -> Result<&'a str, WtStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(WtStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        WtStatus::InvalidArgument
    })
}

fn build_tree(text: &str, out: *mut *mut WtTree) -> WtStatus {
    let tree = match parse_graph(text) {
        Ok(tree) => tree,
        Err(e) => {
            set_error(&e.to_string());
            return WtStatus::ParseError;
        }
    };
    let report = tree.validate();
    if !report.is_ok() {
        let text: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        set_error(&text.join("; "));
        return WtStatus::ValidationError;
    }
    unsafe {
        *out = Box::into_raw(Box::new(WtTree { inner: tree }));
    }
    WtStatus::Ok
}

/// Parse a graph description (the same line format the CLI reads) and
/// validate it. On success `*out` owns the new tree.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wt_tree_parse_string(
    text: *const c_char,
    out: *mut *mut WtTree,
) -> WtStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output argument");
            return WtStatus::NullArgument;
        }
        let text = match read_c_str(text) {
            Ok(text) => text,
            Err(status) => return status,
        };
        build_tree(text, out)
    })
}

/// Read and parse a graph file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wt_tree_parse_file(
    path: *const c_char,
    out: *mut *mut WtTree,
) -> WtStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output argument");
            return WtStatus::NullArgument;
        }
        let path = match read_c_str(path) {
            Ok(path) => path,
            Err(status) => return status,
        };
        match std::fs::read_to_string(path) {
            Ok(text) => build_tree(&text, out),
            Err(e) => {
                set_error(&format!("cannot read {path}: {e}"));
                WtStatus::IoError
            }
        }
    })
}

/// Release a tree handle. Passing null is a no-op.
///
/// # Safety
/// `tree` must be null or a pointer previously returned by a constructor
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wt_tree_free(tree: *mut WtTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Number of edges, 0 for null.
///
/// # Safety
/// `tree` must be null or a live tree handle.
#[no_mangle]
pub unsafe extern "C" fn wt_tree_edge_count(tree: *const WtTree) -> usize {
    tree.as_ref().map_or(0, |t| t.inner.edges().len())
}

/// Number of leaves, 0 for null.
///
/// # Safety
/// `tree` must be null or a live tree handle.
#[no_mangle]
pub unsafe extern "C" fn wt_tree_leaf_count(tree: *const WtTree) -> usize {
    tree.as_ref().map_or(0, |t| t.inner.leaf_order().len())
}

/// Copy up to `capacity` leaf ids (ascending) into `out`; `*written`
/// receives the total leaf count, which may exceed `capacity`.
///
/// # Safety
/// `tree` must be a live tree handle, `out` must point to `capacity`
/// writable u64 slots, `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wt_tree_leaves(
    tree: *const WtTree,
    out: *mut u64,
    capacity: usize,
    written: *mut usize,
) -> WtStatus {
    guard(|| {
        let (Some(tree), false) = (tree.as_ref(), written.is_null()) else {
            set_error("null argument");
            return WtStatus::NullArgument;
        };
        let leaves = tree.inner.leaf_order();
        *written = leaves.len();
        if capacity > 0 && out.is_null() {
            set_error("null output buffer");
            return WtStatus::NullArgument;
        }
        for (i, leaf) in leaves.iter().take(capacity).enumerate() {
            *out.add(i) = leaf.0;
        }
        WtStatus::Ok
    })
}

fn solver_options(steps_per_unit: f64) -> SolverOptions {
    let mut options = SolverOptions::default();
    if steps_per_unit > 0.0 {
        options.steps_per_unit = steps_per_unit;
    }
    options
}

fn store_weyl(matrix: WeylMatrix, min_rcond: f64, out: *mut *mut WtWeyl) -> WtStatus {
    unsafe {
        *out = Box::into_raw(Box::new(WtWeyl { matrix, min_rcond }));
    }
    WtStatus::Ok
}

/// Weyl matrix by incremental synthesis at rho = rho_re + i rho_im.
/// `root_leaf < 0` picks the smallest leaf id; `steps_per_unit <= 0` keeps
/// the default integration density.
///
/// # Safety
/// `tree` must be a live tree handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wt_weyl_synthesize(
    tree: *const WtTree,
    rho_re: f64,
    rho_im: f64,
    root_leaf: i64,
    steps_per_unit: f64,
    out: *mut *mut WtWeyl,
) -> WtStatus {
    guard(|| {
        let (Some(tree), false) = (tree.as_ref(), out.is_null()) else {
            set_error("null argument");
            return WtStatus::NullArgument;
        };
        let leaves = tree.inner.leaf_order();
        let root = if root_leaf < 0 {
            match leaves.first() {
                Some(&leaf) => leaf,
                None => {
                    set_error("tree has no leaves");
                    return WtStatus::InvalidArgument;
                }
            }
        } else {
            VertexId(root_leaf as u64)
        };
        let plan = match tree.inner.plan_growth(root) {
            Ok(plan) => plan,
            Err(e) => {
                set_error(&e.to_string());
                return WtStatus::InvalidArgument;
            }
        };
        let rho = SpectralParameter::from_rho(Complex64::new(rho_re, rho_im));
        match synthesize(&tree.inner, &plan, rho, &solver_options(steps_per_unit)) {
            Ok(result) => store_weyl(result.weyl, result.min_rcond, out),
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Weyl matrix by direct global assembly; the independent reference path.
///
/// # Safety
/// `tree` must be a live tree handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wt_weyl_direct(
    tree: *const WtTree,
    rho_re: f64,
    rho_im: f64,
    steps_per_unit: f64,
    out: *mut *mut WtWeyl,
) -> WtStatus {
    guard(|| {
        let (Some(tree), false) = (tree.as_ref(), out.is_null()) else {
            set_error("null argument");
            return WtStatus::NullArgument;
        };
        let rho = SpectralParameter::from_rho(Complex64::new(rho_re, rho_im));
        match direct_weyl(&tree.inner, rho, &solver_options(steps_per_unit)) {
            Ok(result) => store_weyl(result.weyl, result.rcond, out),
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Release a matrix handle. Passing null is a no-op.
///
/// # Safety
/// `weyl` must be null or a pointer previously returned by a constructor
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wt_weyl_free(weyl: *mut WtWeyl) {
    if !weyl.is_null() {
        drop(Box::from_raw(weyl));
    }
}

/// Matrix dimension (leaf count), 0 for null.
///
/// # Safety
/// `weyl` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn wt_weyl_dim(weyl: *const WtWeyl) -> usize {
    weyl.as_ref().map_or(0, |w| w.matrix.dim())
}

/// Smallest reciprocal-condition estimate met while computing the matrix.
///
/// # Safety
/// `weyl` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn wt_weyl_min_rcond(weyl: *const WtWeyl) -> f64 {
    weyl.as_ref().map_or(0.0, |w| w.min_rcond)
}

/// The lambda the matrix was evaluated at.
///
/// # Safety
/// All pointers must be valid; `weyl` must be a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn wt_weyl_lambda(
    weyl: *const WtWeyl,
    re: *mut f64,
    im: *mut f64,
) -> WtStatus {
    guard(|| {
        let (Some(weyl), false, false) = (weyl.as_ref(), re.is_null(), im.is_null()) else {
            set_error("null argument");
            return WtStatus::NullArgument;
        };
        *re = weyl.matrix.lambda().re;
        *im = weyl.matrix.lambda().im;
        WtStatus::Ok
    })
}

/// Leaf ids labelling the rows and columns, like `wt_tree_leaves`.
///
/// # Safety
/// `weyl` must be a live matrix handle, `out` must point to `capacity`
/// writable u64 slots, `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wt_weyl_leaves(
    weyl: *const WtWeyl,
    out: *mut u64,
    capacity: usize,
    written: *mut usize,
) -> WtStatus {
    guard(|| {
        let (Some(weyl), false) = (weyl.as_ref(), written.is_null()) else {
            set_error("null argument");
            return WtStatus::NullArgument;
        };
        let leaves = weyl.matrix.leaves();
        *written = leaves.len();
        if capacity > 0 && out.is_null() {
            set_error("null output buffer");
            return WtStatus::NullArgument;
        }
        for (i, leaf) in leaves.iter().take(capacity).enumerate() {
            *out.add(i) = leaf.0;
        }
        WtStatus::Ok
    })
}

/// One entry, row `i`, column `j`.
///
/// # Safety
/// All pointers must be valid; `weyl` must be a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn wt_weyl_entry(
    weyl: *const WtWeyl,
    i: usize,
    j: usize,
    re: *mut f64,
    im: *mut f64,
) -> WtStatus {
    guard(|| {
        let (Some(weyl), false, false) = (weyl.as_ref(), re.is_null(), im.is_null()) else {
            set_error("null argument");
            return WtStatus::NullArgument;
        };
        let dim = weyl.matrix.dim();
        if i >= dim || j >= dim {
            set_error(&format!("entry ({i}, {j}) outside a {dim}x{dim} matrix"));
            return WtStatus::DimensionMismatch;
        }
        let value = weyl.matrix.entry(i, j);
        *re = value.re;
        *im = value.im;
        WtStatus::Ok
    })
}

/// Copy the whole matrix into `out` as row-major interleaved re, im pairs;
/// `capacity_doubles` must be at least `2 * dim * dim`.
///
/// # Safety
/// `weyl` must be a live matrix handle and `out` must point to
/// `capacity_doubles` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn wt_weyl_entries(
    weyl: *const WtWeyl,
    out: *mut f64,
    capacity_doubles: usize,
) -> WtStatus {
    guard(|| {
        let (Some(weyl), false) = (weyl.as_ref(), out.is_null()) else {
            set_error("null argument");
            return WtStatus::NullArgument;
        };
        let dim = weyl.matrix.dim();
        if capacity_doubles < 2 * dim * dim {
            set_error(&format!(
                "buffer holds {capacity_doubles} doubles, {} needed",
                2 * dim * dim
            ));
            return WtStatus::DimensionMismatch;
        }
        for i in 0..dim {
            for j in 0..dim {
                let value = weyl.matrix.entry(i, j);
                *out.add(2 * (i * dim + j)) = value.re;
                *out.add(2 * (i * dim + j) + 1) = value.im;
            }
        }
        WtStatus::Ok
    })
}

/// Largest relative entry deviation between two matrices over the same
/// leaves at the same lambda.
///
/// # Safety
/// `a` and `b` must be live matrix handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wt_weyl_compare(
    a: *const WtWeyl,
    b: *const WtWeyl,
    out: *mut f64,
) -> WtStatus {
    guard(|| {
        let (Some(a), Some(b), false) = (a.as_ref(), b.as_ref(), out.is_null()) else {
            set_error("null argument");
            return WtStatus::NullArgument;
        };
        match compare(&a.matrix, &b.matrix) {
            Ok(deviation) => {
                *out = deviation;
                WtStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Apply the Dirichlet-to-Neumann map. `f` and `out` are interleaved re, im
/// pairs in canonical leaf order; `len_doubles` counts doubles in `f` and
/// must equal `2 * dim`.
///
/// # Safety
/// `weyl` must be a live matrix handle; `f` and `out` must point to
/// `len_doubles` readable/writable doubles respectively.
#[no_mangle]
pub unsafe extern "C" fn wt_dtn_apply(
    weyl: *const WtWeyl,
    f: *const f64,
    len_doubles: usize,
    out: *mut f64,
) -> WtStatus {
    guard(|| {
        let (Some(weyl), false, false) = (weyl.as_ref(), f.is_null(), out.is_null()) else {
            set_error("null argument");
            return WtStatus::NullArgument;
        };
        let dim = weyl.matrix.dim();
        if len_doubles != 2 * dim {
            set_error(&format!("{len_doubles} doubles for {dim} leaves"));
            return WtStatus::DimensionMismatch;
        }
        let values: Vec<Complex64> = (0..dim)
            .map(|i| Complex64::new(*f.add(2 * i), *f.add(2 * i + 1)))
            .collect();
        match apply_dtn(&weyl.matrix, &BoundaryData::dirichlet(values)) {
            Ok(neumann) => {
                for (i, value) in neumann.values.iter().enumerate() {
                    *out.add(2 * i) = value.re;
                    *out.add(2 * i + 1) = value.im;
                }
                WtStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Scan `[lambda_min, lambda_max]` for Dirichlet eigenvalues on a grid of
/// `grid_points`. Up to `capacity` results are copied into `out`;
/// `*written` receives the number found (which may exceed `capacity`).
///
/// # Safety
/// `tree` must be a live tree handle, `out` must point to `capacity`
/// writable doubles, `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wt_spectrum_scan(
    tree: *const WtTree,
    lambda_min: f64,
    lambda_max: f64,
    grid_points: usize,
    steps_per_unit: f64,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> WtStatus {
    guard(|| {
        let (Some(tree), false) = (tree.as_ref(), written.is_null()) else {
            set_error("null argument");
            return WtStatus::NullArgument;
        };
        let options = ScanOptions {
            solver: solver_options(steps_per_unit),
            ..ScanOptions::default()
        };
        match dirichlet_scan(&tree.inner, (lambda_min, lambda_max), grid_points, &options) {
            Ok(found) => {
                *written = found.len();
                if capacity > 0 && out.is_null() {
                    set_error("null output buffer");
                    return WtStatus::NullArgument;
                }
                for (i, lambda) in found.iter().take(capacity).enumerate() {
                    *out.add(i) = *lambda;
                }
                WtStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}
