//! C ABI over the volcol column selection library.
//!
//! Conventions: every fallible call returns a [`vc_status`] and writes its
//! result through out-pointers only on `VC_OK`. On failure a thread-local
//! message is set; read it with [`vc_last_error_message`]. Matrices live
//! behind the opaque [`vc_matrix`] handle, created and destroyed here.
//! Strings returned through out-pointers are owned by the caller and must
//! go back to [`vc_string_free`].

#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use volcol::{greedy, hardness, linalg, sampler, symfunc};
use volcol::{ColumnSubset, DenseMatrix, Error};

/// Result of every fallible call in this API.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum vc_status {
    /// The call succeeded and all out-pointers are filled.
    VC_OK = 0,
    /// A required pointer argument was null.
    VC_NULL_POINTER = 1,
    /// An argument was out of range, unsorted, or otherwise malformed.
    VC_INVALID_ARGUMENT = 2,
    /// Matrix data contained NaN or infinity.
    VC_NOT_FINITE = 3,
    /// The instance has too little numerical rank for the request.
    VC_RANK_DEFICIENT = 4,
    /// The request would enumerate more subsets than the configured cap.
    VC_CAP_EXCEEDED = 5,
    /// An operating system error was reported.
    VC_IO = 6,
    /// An unexpected internal failure; please report it.
    VC_INTERNAL = 7,
}

/// Opaque dense row-major matrix handle.
pub struct vc_matrix(DenseMatrix);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: vc_status, message: &str) -> vc_status {
    let stored = CString::new(message).unwrap_or_else(|_| c"invalid error text".to_owned());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = stored);
    status
}

fn pass() -> vc_status {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::default());
    vc_status::VC_OK
}

fn status_of(e: &Error) -> vc_status {
    match e {
        Error::NonFiniteEntry { .. } => vc_status::VC_NOT_FINITE,
        Error::RankDeficient { .. }
        | Error::DegeneratePivot { .. }
        | Error::InfeasibleCompletion { .. }
        | Error::NotPsd { .. }
        | Error::NotSymmetric
        | Error::DependentColumns
        | Error::RankTooLow { .. }
        | Error::NoConvergence { .. } => vc_status::VC_RANK_DEFICIENT,
        Error::OracleCapExceeded { .. } => vc_status::VC_CAP_EXCEEDED,
        Error::Io(_) => vc_status::VC_IO,
        _ => vc_status::VC_INVALID_ARGUMENT,
    }
}

fn fail_with(e: &Error) -> vc_status {
    fail(status_of(e), &e.to_string())
}

/// Panics must not unwind across the C boundary, so every body runs guarded.
fn guarded(f: impl FnOnce() -> vc_status) -> vc_status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(vc_status::VC_INTERNAL, "unexpected internal panic"),
    }
}

/// Last error message of the current thread as a NUL-terminated string.
///
/// Empty after a successful call. The pointer stays valid until the next
/// call into this library from the same thread; copy it if you keep it.
#[no_mangle]
pub extern "C" fn vc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Creates a matrix from `rows * cols` row-major entries.
///
/// # Safety
/// `data` must point to `len` readable doubles and `out` must be a valid
/// pointer to a `vc_matrix*` slot.
#[no_mangle]
pub unsafe extern "C" fn vc_matrix_create(
    rows: usize,
    cols: usize,
    data: *const f64,
    len: usize,
    out: *mut *mut vc_matrix,
) -> vc_status {
    guarded(|| {
        if data.is_null() || out.is_null() {
            return fail(vc_status::VC_NULL_POINTER, "data and out must be non-null");
        }
        let entries = unsafe { std::slice::from_raw_parts(data, len) }.to_vec();
        match DenseMatrix::new(rows, cols, entries) {
            Ok(m) => {
                unsafe { *out = Box::into_raw(Box::new(vc_matrix(m))) };
                pass()
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Creates the n-by-n identity matrix.
///
/// # Safety
/// `out` must be a valid pointer to a `vc_matrix*` slot.
#[no_mangle]
pub unsafe extern "C" fn vc_matrix_identity(n: usize, out: *mut *mut vc_matrix) -> vc_status {
    guarded(|| {
        if out.is_null() {
            return fail(vc_status::VC_NULL_POINTER, "out must be non-null");
        }
        if n == 0 {
            return fail(vc_status::VC_INVALID_ARGUMENT, "n must be at least 1");
        }
        unsafe { *out = Box::into_raw(Box::new(vc_matrix(DenseMatrix::identity(n)))) };
        pass()
    })
}

/// Creates the worst-case instance: `blocks` groups of `block_size` nearly
/// parallel columns, each group's Gram being delta*I + J.
///
/// # Safety
/// `out` must be a valid pointer to a `vc_matrix*` slot.
#[no_mangle]
pub unsafe extern "C" fn vc_matrix_hard_instance(
    blocks: usize,
    block_size: usize,
    delta: f64,
    out: *mut *mut vc_matrix,
) -> vc_status {
    guarded(|| {
        if out.is_null() {
            return fail(vc_status::VC_NULL_POINTER, "out must be non-null");
        }
        let built = hardness::HardInstanceSpec::new(blocks, block_size, delta)
            .and_then(|spec| hardness::block_instance(&spec));
        match built {
            Ok(m) => {
                unsafe { *out = Box::into_raw(Box::new(vc_matrix(m))) };
                pass()
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Releases a matrix handle. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle returned by this library that has not been
/// freed yet.
#[no_mangle]
pub unsafe extern "C" fn vc_matrix_free(m: *mut vc_matrix) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn vc_matrix_rows(m: *const vc_matrix) -> usize {
    if m.is_null() {
        return 0;
    }
    unsafe { &*m }.0.rows()
}

/// Number of columns, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn vc_matrix_cols(m: *const vc_matrix) -> usize {
    if m.is_null() {
        return 0;
    }
    unsafe { &*m }.0.cols()
}

/// Reads one entry.
///
/// # Safety
/// `m` must be a live handle and `out` a valid double slot.
#[no_mangle]
pub unsafe extern "C" fn vc_matrix_get(
    m: *const vc_matrix,
    row: usize,
    col: usize,
    out: *mut f64,
) -> vc_status {
    guarded(|| {
        if m.is_null() || out.is_null() {
            return fail(
                vc_status::VC_NULL_POINTER,
                "matrix and out must be non-null",
            );
        }
        let x = &unsafe { &*m }.0;
        if row >= x.rows() || col >= x.cols() {
            return fail(
                vc_status::VC_INVALID_ARGUMENT,
                &format!(
                    "entry ({row}, {col}) outside a {}x{} matrix",
                    x.rows(),
                    x.cols()
                ),
            );
        }
        unsafe { *out = x.get(row, col) };
        pass()
    })
}

fn subset_from_raw(
    x: &DenseMatrix,
    indices: *const usize,
    len: usize,
) -> Result<ColumnSubset, Error> {
    let raw = if len == 0 {
        Vec::new()
    } else {
        unsafe { std::slice::from_raw_parts(indices, len) }.to_vec()
    };
    ColumnSubset::new(raw, x.cols())
}

/// Squared Frobenius distance to the best rank-k approximation.
///
/// # Safety
/// `m` must be a live handle and `out` a valid double slot.
#[no_mangle]
pub unsafe extern "C" fn vc_rank_k_error(
    m: *const vc_matrix,
    k: usize,
    out: *mut f64,
) -> vc_status {
    guarded(|| {
        if m.is_null() || out.is_null() {
            return fail(
                vc_status::VC_NULL_POINTER,
                "matrix and out must be non-null",
            );
        }
        match linalg::rank_k_error(&unsafe { &*m }.0, k) {
            Ok(v) => {
                unsafe { *out = v };
                pass()
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Squared Frobenius error of projecting onto the span of the listed
/// columns. `indices` must be strictly increasing.
///
/// # Safety
/// `m` must be a live handle, `indices` must point to `len` readable
/// size_t values (ignored when `len` is 0), and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vc_residual_trace(
    m: *const vc_matrix,
    indices: *const usize,
    len: usize,
    out: *mut f64,
) -> vc_status {
    guarded(|| {
        if m.is_null() || out.is_null() || (len > 0 && indices.is_null()) {
            return fail(
                vc_status::VC_NULL_POINTER,
                "matrix, indices, and out must be non-null",
            );
        }
        let x = &unsafe { &*m }.0;
        let result = subset_from_raw(x, indices, len).and_then(|c| linalg::residual_trace(x, &c));
        match result {
            Ok(v) => {
                unsafe { *out = v };
                pass()
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Expected residual of completing the listed columns to a volume-sampled
/// r-subset. With `len` 0 this is the unconditioned expectation.
///
/// # Safety
/// Same contract as [`vc_residual_trace`].
#[no_mangle]
pub unsafe extern "C" fn vc_conditional_expectation(
    m: *const vc_matrix,
    indices: *const usize,
    len: usize,
    r: usize,
    out: *mut f64,
) -> vc_status {
    guarded(|| {
        if m.is_null() || out.is_null() || (len > 0 && indices.is_null()) {
            return fail(
                vc_status::VC_NULL_POINTER,
                "matrix, indices, and out must be non-null",
            );
        }
        let x = &unsafe { &*m }.0;
        let result = subset_from_raw(x, indices, len)
            .and_then(|c| greedy::conditional_expectation(x, &c, r));
        match result {
            Ok(v) => {
                unsafe { *out = v };
                pass()
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Deterministic selection of r columns by conditional-expectation descent.
/// Writes the chosen indices in increasing order.
///
/// # Safety
/// `m` must be a live handle, `out_indices` must have room for `r` size_t
/// values, and `out_residual` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vc_greedy_select(
    m: *const vc_matrix,
    r: usize,
    out_indices: *mut usize,
    out_residual: *mut f64,
) -> vc_status {
    guarded(|| {
        if m.is_null() || out_indices.is_null() || out_residual.is_null() {
            return fail(vc_status::VC_NULL_POINTER, "all arguments must be non-null");
        }
        match greedy::greedy_select(&unsafe { &*m }.0, r) {
            Ok(sel) => {
                let slots = unsafe { std::slice::from_raw_parts_mut(out_indices, r) };
                slots.copy_from_slice(sel.chosen.as_slice());
                unsafe { *out_residual = sel.residual };
                pass()
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Draws r columns with probability proportional to the squared volume of
/// their span, from the deterministic stream of `seed`. Writes the chosen
/// indices in increasing order.
///
/// # Safety
/// Same contract as [`vc_greedy_select`].
#[no_mangle]
pub unsafe extern "C" fn vc_volume_sample(
    m: *const vc_matrix,
    r: usize,
    seed: u64,
    out_indices: *mut usize,
    out_residual: *mut f64,
) -> vc_status {
    guarded(|| {
        if m.is_null() || out_indices.is_null() || out_residual.is_null() {
            return fail(vc_status::VC_NULL_POINTER, "all arguments must be non-null");
        }
        let x = &unsafe { &*m }.0;
        let result = sampler::volume_sample_seeded(x, r, seed)
            .and_then(|trace| Ok((linalg::residual_trace(x, &trace.subset)?, trace.subset)));
        match result {
            Ok((residual, subset)) => {
                let slots = unsafe { std::slice::from_raw_parts_mut(out_indices, r) };
                slots.copy_from_slice(subset.as_slice());
                unsafe { *out_residual = residual };
                pass()
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Elementary symmetric polynomial S_r of the given values.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vc_elem_sym(
    values: *const f64,
    len: usize,
    r: usize,
    out: *mut f64,
) -> vc_status {
    guarded(|| {
        if values.is_null() || out.is_null() {
            return fail(
                vc_status::VC_NULL_POINTER,
                "values and out must be non-null",
            );
        }
        let v = unsafe { std::slice::from_raw_parts(values, len) };
        match symfunc::elem_sym(v, r) {
            Ok(s) => {
                unsafe { *out = s };
                pass()
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// The ratio S_{r+1}/S_r of the given nonnegative values.
///
/// # Safety
/// Same contract as [`vc_elem_sym`].
#[no_mangle]
pub unsafe extern "C" fn vc_sym_ratio(
    values: *const f64,
    len: usize,
    r: usize,
    out: *mut f64,
) -> vc_status {
    guarded(|| {
        if values.is_null() || out.is_null() {
            return fail(
                vc_status::VC_NULL_POINTER,
                "values and out must be non-null",
            );
        }
        let v = unsafe { std::slice::from_raw_parts(values, len) };
        match symfunc::sym_ratio(v, r) {
            Ok(s) => {
                unsafe { *out = s };
                pass()
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Closed-form floor on the ratio any r-subset of the block instance can
/// achieve against its best rank-k approximation, k being the block count.
///
/// # Safety
/// `out` must be a valid double slot.
#[no_mangle]
pub unsafe extern "C" fn vc_predicted_block_ratio(
    blocks: usize,
    block_size: usize,
    delta: f64,
    r: usize,
    out: *mut f64,
) -> vc_status {
    guarded(|| {
        if out.is_null() {
            return fail(vc_status::VC_NULL_POINTER, "out must be non-null");
        }
        let result = hardness::HardInstanceSpec::new(blocks, block_size, delta)
            .and_then(|spec| hardness::predicted_block_ratio(&spec, r));
        match result {
            Ok(v) => {
                unsafe { *out = v };
                pass()
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Quality report for a manual selection against the rank-k baseline, as a
/// JSON document. Free the string with [`vc_string_free`].
///
/// # Safety
/// `m` must be a live handle, `indices` must point to `len` readable
/// size_t values, and `out` must be a valid `char*` slot.
#[no_mangle]
pub unsafe extern "C" fn vc_bound_report_json(
    m: *const vc_matrix,
    indices: *const usize,
    len: usize,
    k: usize,
    out: *mut *mut c_char,
) -> vc_status {
    guarded(|| {
        if m.is_null() || indices.is_null() || out.is_null() {
            return fail(
                vc_status::VC_NULL_POINTER,
                "matrix, indices, and out must be non-null",
            );
        }
        let x = &unsafe { &*m }.0;
        let result = subset_from_raw(x, indices, len).and_then(|c| greedy::bound_report(x, &c, k));
        match result {
            Ok(report) => {
                let text = CString::new(report.to_json()).expect("JSON reports never contain NUL");
                unsafe { *out = text.into_raw() };
                pass()
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library that has not been
/// freed yet.
#[no_mangle]
pub unsafe extern "C" fn vc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
