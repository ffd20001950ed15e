use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use dca_ffi::*;

struct Session {
    raw: *mut DcaSession,
    _dir: tempfile::TempDir,
}

impl Session {
    fn new(p_order: i32, degree: u32, mode_window: i32) -> Session {
        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().to_str().unwrap()).unwrap();
        let mut raw = ptr::null_mut();
        let st = unsafe { dca_session_new(p_order, 2, degree, mode_window, 16, path.as_ptr(), &mut raw) };
        assert_eq!(st, DcaStatus::Ok);
        assert!(!raw.is_null());
        Session { raw, _dir: dir }
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        unsafe { dca_session_free(self.raw) };
    }
}

fn take(s: *mut c_char) -> serde_json::Value {
    assert!(!s.is_null());
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { dca_string_free(s) };
    serde_json::from_str(&text).unwrap()
}

#[test]
fn series_returns_json() {
    let s = Session::new(2, 1, 1);
    let name = CString::new("g").unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { dca_series(s.raw, name.as_ptr(), &mut out) };
    assert_eq!(st, DcaStatus::Ok);
    let v = take(out);
    assert_eq!(v["series"], "g");
    assert_eq!(v["form"]["factors"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_reports_status() {
    let s = Session::new(2, 1, 1);
    let rel = CString::new("odin").unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { dca_verify(s.raw, rel.as_ptr(), &mut out) };
    assert_eq!(st, DcaStatus::Ok);
    let v = take(out);
    assert_eq!(v["status"], "verified");
    assert_eq!(v["wall_time_ms"], 0);
}

#[test]
fn ope_lists_poles() {
    let s = Session::new(2, 1, 1);
    let (a, b) = (CString::new("T").unwrap(), CString::new("T").unwrap());
    let mut out = ptr::null_mut();
    let st = unsafe { dca_ope(s.raw, a.as_ptr(), b.as_ptr(), &mut out) };
    assert_eq!(st, DcaStatus::Ok);
    let poles = take(out)["poles"].as_array().unwrap().clone();
    assert!(poles.iter().any(|p| p["a2"] == 0 && p["b"] == 1));
}

#[test]
fn error_codes() {
    let s = Session::new(2, 1, 1);
    let bad = CString::new("nope").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { dca_verify(s.raw, bad.as_ptr(), &mut out) }, DcaStatus::UnknownName);
    assert_eq!(take(out)["status"], "error");
    assert_eq!(unsafe { dca_series(s.raw, bad.as_ptr(), &mut out) }, DcaStatus::UnknownName);
    take(out);
    assert_eq!(unsafe { dca_series(s.raw, ptr::null(), &mut out) }, DcaStatus::NullPointer);
    take(out);
    assert_eq!(unsafe { dca_series(ptr::null(), bad.as_ptr(), &mut out) }, DcaStatus::NullPointer);
    take(out);
    assert_eq!(unsafe { dca_series(s.raw, bad.as_ptr(), ptr::null_mut()) }, DcaStatus::NullPointer);
    let mut raw = ptr::null_mut();
    assert_eq!(unsafe { dca_session_new(0, 2, 1, 1, 16, ptr::null(), &mut raw) }, DcaStatus::InvalidArgument);
    assert!(raw.is_null());
    unsafe { dca_session_free(ptr::null_mut()) };
    unsafe { dca_string_free(ptr::null_mut()) };
}

#[test]
fn status_messages_are_static() {
    for st in [DcaStatus::Ok, DcaStatus::Failed, DcaStatus::Panic] {
        let m = unsafe { CStr::from_ptr(dca_status_message(st)) };
        assert!(!m.to_bytes().is_empty());
    }
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/dca.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["dca_session_new", "dca_session_free", "dca_verify", "dca_series", "dca_ope", "dca_string_free"] {
        assert!(text.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(text.contains("typedef struct DcaSession DcaSession;"));
    if let Ok(o) = Command::new("cc").args(["-x", "c", "-fsyntax-only"]).arg(&header).output() {
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
}
