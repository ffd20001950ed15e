//! C ABI over `dca-core`: an opaque session holding the run configuration,
//! JSON results returned as owned C strings, and status codes.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use dca_core::cli::{cmd_ope, cmd_series, run_verify, Output, RunConfig};
use dca_core::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcaStatus {
    Ok = 0,
    /// The verification ran and found a mismatch; the report is returned.
    Failed = 1,
    InvalidArgument = 2,
    UnknownName = 3,
    ComputeError = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Opaque session; create with `dca_session_new`, release with
/// `dca_session_free`.
pub struct DcaSession {
    config: RunConfig,
}

fn status_of(e: &Error) -> DcaStatus {
    match e {
        Error::UnknownSeries(_) | Error::UnknownField(_) | Error::UnknownRelation(_) => DcaStatus::UnknownName,
        Error::InvalidConfig(_) | Error::Parse(_) => DcaStatus::InvalidArgument,
        _ => DcaStatus::ComputeError,
    }
}

unsafe fn arg<'a>(s: *const c_char) -> Result<&'a str, DcaStatus> {
    if s.is_null() {
        return Err(DcaStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| DcaStatus::InvalidArgument)
}

fn emit(out: *mut *mut c_char, json: &serde_json::Value) -> DcaStatus {
    let text = serde_json::to_string(json).expect("JSON values always serialize");
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            DcaStatus::Ok
        }
        Err(_) => DcaStatus::ComputeError,
    }
}

/// Run `f` behind a panic guard, writing its JSON to `*out`. On error the
/// JSON describes the error.
fn guarded(out: *mut *mut c_char, f: impl FnOnce() -> Result<(serde_json::Value, DcaStatus), (String, DcaStatus)>) -> DcaStatus {
    if out.is_null() {
        return DcaStatus::NullPointer;
    }
    unsafe { *out = ptr::null_mut() };
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok((json, status))) => match emit(out, &json) {
            DcaStatus::Ok => status,
            s => s,
        },
        Ok(Err((msg, status))) => {
            emit(out, &serde_json::json!({ "status": "error", "error": msg }));
            status
        }
        Err(_) => DcaStatus::Panic,
    }
}

fn lift(r: dca_core::Result<Output>) -> Result<(serde_json::Value, DcaStatus), (String, DcaStatus)> {
    r.map(|o| (o.json, DcaStatus::Ok)).map_err(|e| (e.to_string(), status_of(&e)))
}

/// Create a session. `cache_dir` may be null for the default directory.
///
/// # Safety
/// `cache_dir` is null or a valid NUL-terminated string; `out` is a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn dca_session_new(
    p_order: i32,
    buffer: i32,
    degree: u32,
    mode_window: i32,
    x_order: i32,
    cache_dir: *const c_char,
    out: *mut *mut DcaSession,
) -> DcaStatus {
    if out.is_null() {
        return DcaStatus::NullPointer;
    }
    *out = ptr::null_mut();
    let mut config = RunConfig { p_order, buffer, degree, mode_window, x_order, timing: false, ..RunConfig::default() };
    if !cache_dir.is_null() {
        match arg(cache_dir) {
            Ok(d) => config.cache_dir = PathBuf::from(d),
            Err(s) => return s,
        }
    }
    if config.validate(false).is_err() {
        return DcaStatus::InvalidArgument;
    }
    *out = Box::into_raw(Box::new(DcaSession { config }));
    DcaStatus::Ok
}

/// # Safety
/// `session` is null or was returned by `dca_session_new` and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dca_session_free(session: *mut DcaSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Run a named verification and return its report as JSON. Returns
/// `Failed` with the report when the relation does not hold.
///
/// # Safety
/// `session` is a live session, `relation` a valid string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn dca_verify(session: *const DcaSession, relation: *const c_char, out: *mut *mut c_char) -> DcaStatus {
    guarded(out, || {
        let s = session.as_ref().ok_or(("null session".to_string(), DcaStatus::NullPointer))?;
        let rel = arg(relation).map_err(|st| ("bad relation name".to_string(), st))?;
        let r = run_verify(rel, "T", "T", &s.config).map_err(|e| (e.to_string(), status_of(&e)))?;
        let status = if r.verified() { DcaStatus::Ok } else { DcaStatus::Failed };
        Ok((Output::report(&r, false).json, status))
    })
}

/// Product form and expansion of a structure function as JSON.
///
/// # Safety
/// As for `dca_verify`.
#[no_mangle]
pub unsafe extern "C" fn dca_series(session: *const DcaSession, name: *const c_char, out: *mut *mut c_char) -> DcaStatus {
    guarded(out, || {
        let s = session.as_ref().ok_or(("null session".to_string(), DcaStatus::NullPointer))?;
        let n = arg(name).map_err(|st| ("bad series name".to_string(), st))?;
        lift(cmd_series(n, &s.config))
    })
}

/// Pole lines and residues of `A(z)B(w)` as JSON.
///
/// # Safety
/// As for `dca_verify`, with `a` and `b` valid strings.
#[no_mangle]
pub unsafe extern "C" fn dca_ope(
    session: *const DcaSession,
    a: *const c_char,
    b: *const c_char,
    out: *mut *mut c_char,
) -> DcaStatus {
    guarded(out, || {
        let s = session.as_ref().ok_or(("null session".to_string(), DcaStatus::NullPointer))?;
        let a = arg(a).map_err(|st| ("bad field name".to_string(), st))?;
        let b = arg(b).map_err(|st| ("bad field name".to_string(), st))?;
        lift(cmd_ope(a, b, &s.config))
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dca_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn dca_status_message(status: DcaStatus) -> *const c_char {
    let s: &'static CStr = match status {
        DcaStatus::Ok => c"ok",
        DcaStatus::Failed => c"verification failed",
        DcaStatus::InvalidArgument => c"invalid argument",
        DcaStatus::UnknownName => c"unknown name",
        DcaStatus::ComputeError => c"computation error",
        DcaStatus::NullPointer => c"null pointer",
        DcaStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}
