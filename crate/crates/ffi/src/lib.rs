//! C ABI over davis-kit.
//!
//! Fallible calls return a [`DkStatus`]. On failure the message is kept in a
//! thread-local slot readable through [`dk_last_error`]. Handles are opaque and
//! must be released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;
use std::sync::Arc;

use davis_kit::cartan::GeneralizedCartanMatrix;
use davis_kit::cli::{self, Report, RunError};
use davis_kit::coxeter::{CoxeterError, CoxeterSystem};
use davis_kit::hecke::{HeckeAlgebra, HeckeError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    BudgetExceeded = 4,
    Infinite = 5,
    BufferTooSmall = 6,
    Computation = 7,
    Panic = 8,
}

pub struct DkCoxeter(CoxeterSystem);

pub struct DkHecke(Arc<HeckeAlgebra>);

pub struct DkReport {
    passed: bool,
    exit_code: i32,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: DkStatus, msg: impl Into<String>) -> DkStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> DkStatus) -> DkStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(DkStatus::Panic, msg)
        }
    }
}

fn coxeter_status(e: &CoxeterError) -> DkStatus {
    match e {
        CoxeterError::BudgetExceeded { .. } => DkStatus::BudgetExceeded,
        CoxeterError::Infinite => DkStatus::Infinite,
        CoxeterError::IndexOutOfRange { .. } => DkStatus::InvalidInput,
        _ => DkStatus::Computation,
    }
}

fn run_status(e: &RunError) -> DkStatus {
    match e {
        RunError::Input(_) | RunError::Cartan(_) => DkStatus::InvalidInput,
        RunError::BudgetExceeded(_) => DkStatus::BudgetExceeded,
        RunError::Coxeter(c) => coxeter_status(c),
        _ => DkStatus::Computation,
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, DkStatus> {
    if p.is_null() {
        return Err(fail(DkStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(DkStatus::InvalidUtf8, e.to_string()))
}

unsafe fn read_slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], DkStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(DkStatus::NullPointer, "null array"));
    }
    Ok(slice::from_raw_parts(p, len))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn dk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a Coxeter system from a row-major `rank × rank` generalized Cartan matrix.
///
/// # Safety
/// `entries` must point to `rank * rank` integers and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_coxeter_new(entries: *const i64, rank: usize, out: *mut *mut DkCoxeter) -> DkStatus {
    guard(|| {
        if out.is_null() {
            return fail(DkStatus::NullPointer, "null output");
        }
        *out = ptr::null_mut();
        let Some(len) = rank.checked_mul(rank) else {
            return fail(DkStatus::InvalidInput, "rank overflow");
        };
        let data = match read_slice(entries, len) {
            Ok(d) => d,
            Err(s) => return s,
        };
        let rows = data.chunks(rank.max(1)).map(<[i64]>::to_vec).collect();
        match GeneralizedCartanMatrix::new(rows) {
            Ok(a) => {
                *out = Box::into_raw(Box::new(DkCoxeter(CoxeterSystem::new(a))));
                DkStatus::Ok
            }
            Err(e) => fail(DkStatus::InvalidInput, e.to_string()),
        }
    })
}

/// # Safety
/// `h` must be NULL or a live handle from [`dk_coxeter_new`].
#[no_mangle]
pub unsafe extern "C" fn dk_coxeter_free(h: *mut DkCoxeter) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Caps the number of group elements enumerated by later calls.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dk_coxeter_set_element_cap(h: *mut DkCoxeter, cap: usize) -> DkStatus {
    guard(|| {
        let Some(h) = h.as_mut() else {
            return fail(DkStatus::NullPointer, "null handle");
        };
        h.0 = h.0.clone().with_element_cap(cap);
        DkStatus::Ok
    })
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dk_coxeter_rank(h: *const DkCoxeter, out: *mut usize) -> DkStatus {
    guard(|| match (h.as_ref(), out.is_null()) {
        (Some(h), false) => {
            *out = h.0.rank();
            DkStatus::Ok
        }
        _ => fail(DkStatus::NullPointer, "null argument"),
    })
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dk_coxeter_is_finite(h: *const DkCoxeter, out: *mut bool) -> DkStatus {
    guard(|| match (h.as_ref(), out.is_null()) {
        (Some(h), false) => {
            *out = h.0.is_finite();
            DkStatus::Ok
        }
        _ => fail(DkStatus::NullPointer, "null argument"),
    })
}

/// Order of a finite Weyl group. Fails with `INFINITE` or `BUDGET_EXCEEDED`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dk_coxeter_order(h: *const DkCoxeter, out: *mut u64) -> DkStatus {
    guard(|| {
        let (Some(h), false) = (h.as_ref(), out.is_null()) else {
            return fail(DkStatus::NullPointer, "null argument");
        };
        match h.0.elements() {
            Ok(all) => {
                *out = all.len() as u64;
                DkStatus::Ok
            }
            Err(e) => fail(coxeter_status(&e), e.to_string()),
        }
    })
}

/// Writes the canonical reduced word of the product of `word` into `buf`.
/// `out_len` receives the word length even when the buffer is too small.
///
/// # Safety
/// `word` must hold `len` entries, `buf` must hold `cap` entries and
/// `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_coxeter_reduce_word(
    h: *const DkCoxeter,
    word: *const usize,
    len: usize,
    buf: *mut usize,
    cap: usize,
    out_len: *mut usize,
) -> DkStatus {
    guard(|| {
        let (Some(h), false) = (h.as_ref(), out_len.is_null()) else {
            return fail(DkStatus::NullPointer, "null argument");
        };
        let word = match read_slice(word, len) {
            Ok(w) => w,
            Err(s) => return s,
        };
        let w = match h.0.reduce_word(word) {
            Ok(w) => w,
            Err(e) => return fail(coxeter_status(&e), e.to_string()),
        };
        let reduced = w.word();
        *out_len = reduced.len();
        if reduced.len() > cap {
            return fail(DkStatus::BufferTooSmall, format!("need {} entries", reduced.len()));
        }
        if !reduced.is_empty() {
            if buf.is_null() {
                return fail(DkStatus::NullPointer, "null buffer");
            }
            ptr::copy_nonoverlapping(reduced.as_ptr(), buf, reduced.len());
        }
        DkStatus::Ok
    })
}

/// Generic Iwahori-Hecke algebra of a Coxeter system. The Coxeter handle may
/// be freed afterwards.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dk_hecke_new(h: *const DkCoxeter, out: *mut *mut DkHecke) -> DkStatus {
    guard(|| {
        let (Some(h), false) = (h.as_ref(), out.is_null()) else {
            return fail(DkStatus::NullPointer, "null argument");
        };
        *out = Box::into_raw(Box::new(DkHecke(HeckeAlgebra::new(h.0.clone()))));
        DkStatus::Ok
    })
}

/// # Safety
/// `h` must be NULL or a live handle from [`dk_hecke_new`].
#[no_mangle]
pub unsafe extern "C" fn dk_hecke_free(h: *mut DkHecke) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Renders T_u · T_v. Free the string with [`dk_string_free`].
///
/// # Safety
/// `u` and `v` must hold `u_len` and `v_len` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_hecke_multiply(
    h: *const DkHecke,
    u: *const usize,
    u_len: usize,
    v: *const usize,
    v_len: usize,
    out: *mut *mut c_char,
) -> DkStatus {
    guard(|| {
        let (Some(h), false) = (h.as_ref(), out.is_null()) else {
            return fail(DkStatus::NullPointer, "null argument");
        };
        *out = ptr::null_mut();
        let (u, v) = match (read_slice(u, u_len), read_slice(v, v_len)) {
            (Ok(u), Ok(v)) => (u, v),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let product = h.0.basis_word(u).and_then(|a| a.mul(&h.0.basis_word(v)?));
        match product {
            Ok(p) => {
                *out = CString::new(p.to_string()).expect("no interior NUL").into_raw();
                DkStatus::Ok
            }
            Err(HeckeError::Coxeter(e)) => fail(coxeter_status(&e), e.to_string()),
            Err(e) => fail(DkStatus::Computation, e.to_string()),
        }
    })
}

/// Runs a JSON scenario, the same input accepted by `davis-kit run`.
/// A failed verdict still returns `OK`; query it with [`dk_report_passed`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dk_run_scenario_json(json: *const c_char, out: *mut *mut DkReport) -> DkStatus {
    guard(|| {
        if out.is_null() {
            return fail(DkStatus::NullPointer, "null output");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli::run_scenario_json(text) {
            Ok((report, json)) => {
                *out = Box::into_raw(Box::new(wrap_report(&report, json)));
                DkStatus::Ok
            }
            Err(e) => fail(run_status(&e), e.to_string()),
        }
    })
}

fn wrap_report(report: &Report, json: String) -> DkReport {
    DkReport {
        passed: report.passed(),
        exit_code: report.exit_code(),
        json: CString::new(json).expect("JSON has no NUL"),
    }
}

/// # Safety
/// `r` must be NULL or a live handle from [`dk_run_scenario_json`].
#[no_mangle]
pub unsafe extern "C" fn dk_report_free(r: *mut DkReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dk_report_passed(r: *const DkReport) -> bool {
    r.as_ref().is_some_and(|r| r.passed)
}

/// CLI exit code for the report: 0 pass, 1 fail.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dk_report_exit_code(r: *const DkReport) -> i32 {
    r.as_ref().map_or(2, |r| r.exit_code)
}

/// The report as JSON, owned by the handle.
///
/// # Safety
/// `r` must be a live handle; the pointer dies with it.
#[no_mangle]
pub unsafe extern "C" fn dk_report_json(r: *const DkReport) -> *const c_char {
    r.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}
