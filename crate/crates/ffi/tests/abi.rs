use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use davis_kit_ffi::*;

fn last_error() -> String {
    let p = dk_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn coxeter(rows: &[i64], rank: usize) -> *mut DkCoxeter {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { dk_coxeter_new(rows.as_ptr(), rank, &mut h) }, DkStatus::Ok);
    h
}

#[test]
fn coxeter_handle() {
    let h = coxeter(&[2, -1, -1, 2], 2);
    let mut rank = 0;
    let mut finite = false;
    let mut order = 0;
    unsafe {
        assert_eq!(dk_coxeter_rank(h, &mut rank), DkStatus::Ok);
        assert_eq!(dk_coxeter_is_finite(h, &mut finite), DkStatus::Ok);
        assert_eq!(dk_coxeter_order(h, &mut order), DkStatus::Ok);
    }
    assert_eq!((rank, finite, order), (2, true, 6));

    let word = [1usize, 0, 1, 0];
    let mut buf = [0usize; 4];
    let mut len = 0;
    let s = unsafe { dk_coxeter_reduce_word(h, word.as_ptr(), word.len(), buf.as_mut_ptr(), buf.len(), &mut len) };
    assert_eq!(s, DkStatus::Ok);
    assert_eq!(&buf[..len], &[0, 1]);

    let s = unsafe { dk_coxeter_reduce_word(h, word.as_ptr(), word.len(), buf.as_mut_ptr(), 1, &mut len) };
    assert_eq!((s, len), (DkStatus::BufferTooSmall, 2));

    let bad = [5usize];
    let s = unsafe { dk_coxeter_reduce_word(h, bad.as_ptr(), 1, buf.as_mut_ptr(), 4, &mut len) };
    assert_eq!(s, DkStatus::InvalidInput);
    assert!(last_error().contains("out of range"));
    unsafe { dk_coxeter_free(h) };
}

#[test]
fn infinite_and_capped() {
    let h = coxeter(&[2, -2, -2, 2], 2);
    let mut order = 0;
    assert_eq!(unsafe { dk_coxeter_order(h, &mut order) }, DkStatus::Infinite);
    unsafe { dk_coxeter_free(h) };

    let h = coxeter(&[2, -1, 0, -1, 2, -1, 0, -1, 2], 3);
    assert_eq!(unsafe { dk_coxeter_set_element_cap(h, 10) }, DkStatus::Ok);
    assert_eq!(unsafe { dk_coxeter_order(h, &mut order) }, DkStatus::BudgetExceeded);
    unsafe { dk_coxeter_free(h) };
}

#[test]
fn bad_cartan_and_nulls() {
    let mut h = ptr::null_mut();
    let rows = [2i64, 1, -1, 2];
    assert_eq!(unsafe { dk_coxeter_new(rows.as_ptr(), 2, &mut h) }, DkStatus::InvalidInput);
    assert!(h.is_null());
    assert_eq!(unsafe { dk_coxeter_new(ptr::null(), 2, &mut h) }, DkStatus::NullPointer);
    assert_eq!(unsafe { dk_coxeter_new(rows.as_ptr(), 2, ptr::null_mut()) }, DkStatus::NullPointer);
    let mut rank = 0;
    assert_eq!(unsafe { dk_coxeter_rank(ptr::null(), &mut rank) }, DkStatus::NullPointer);
    unsafe {
        dk_coxeter_free(ptr::null_mut());
        dk_hecke_free(ptr::null_mut());
        dk_report_free(ptr::null_mut());
        dk_string_free(ptr::null_mut());
    }
}

#[test]
fn hecke_product() {
    let c = coxeter(&[2, -1, -1, 2], 2);
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { dk_hecke_new(c, &mut h) }, DkStatus::Ok);
    unsafe { dk_coxeter_free(c) };
    let s0 = [0usize];
    let mut out = ptr::null_mut();
    let s = unsafe { dk_hecke_multiply(h, s0.as_ptr(), 1, s0.as_ptr(), 1, &mut out) };
    assert_eq!(s, DkStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    assert_eq!(text, "(q−1)·T_[0] + q·T_[]");
    unsafe {
        dk_string_free(out);
        dk_hecke_free(h);
    }
}

#[test]
fn scenarios() {
    let json = CString::new(r#"{"kind":"spherical","cartan":[[2,-1],[-1,2]]}"#).unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { dk_run_scenario_json(json.as_ptr(), &mut r) }, DkStatus::Ok);
    assert!(unsafe { dk_report_passed(r) });
    assert_eq!(unsafe { dk_report_exit_code(r) }, 0);
    let body = unsafe { CStr::from_ptr(dk_report_json(r)) }.to_str().unwrap();
    let v: serde_json::Value = serde_json::from_str(body).unwrap();
    assert_eq!(v["kind"], "spherical");
    assert_eq!(v["verdict"], "pass");
    unsafe { dk_report_free(r) };

    let json = CString::new(r#"{"kind":"nonsense"}"#).unwrap();
    assert_eq!(unsafe { dk_run_scenario_json(json.as_ptr(), &mut r) }, DkStatus::InvalidInput);
    assert!(r.is_null());
    assert!(!last_error().is_empty());

    let bytes = [0xffu8, 0];
    assert_eq!(unsafe { dk_run_scenario_json(bytes.as_ptr().cast(), &mut r) }, DkStatus::InvalidUtf8);
}

#[test]
fn header_declares_the_api() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/davis_kit.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "dk_last_error",
        "dk_string_free",
        "dk_coxeter_new",
        "dk_coxeter_reduce_word",
        "dk_hecke_multiply",
        "dk_run_scenario_json",
        "dk_report_json",
        "DK_STATUS_BUDGET_EXCEEDED",
        "typedef struct DkCoxeter DkCoxeter",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        return;
    };
    if !cc.status.success() {
        return;
    }
    let status = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
        .unwrap();
    assert!(status.success(), "header does not compile as C");
}
