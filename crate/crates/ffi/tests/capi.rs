use std::ffi::{CStr, CString};
use std::ptr;

use typea_ffi::*;

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    typea_string_free(p);
    s
}

#[test]
fn cubic_report_through_handles() {
    unsafe {
        let mut report = ptr::null_mut();
        assert_eq!(typea_quantum_cubic(&mut report), TypeaStatus::Ok);
        assert!(typea_report_passed(report));
        assert!(typea_report_check_count(report) > 0);
        let mut json = ptr::null_mut();
        assert_eq!(typea_report_json(report, &mut json), TypeaStatus::Ok);
        let json = take_string(json);
        assert!(json.contains("\"status\": \"pass\""));
        let mut text = ptr::null_mut();
        assert_eq!(typea_report_text(report, &mut text), TypeaStatus::Ok);
        assert!(take_string(text).contains("lines = 27"));
        typea_report_free(report);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut report = ptr::null_mut();
        assert_eq!(typea_jacobian(9, 3, false, &mut report), TypeaStatus::InvalidArgument);
        assert!(report.is_null());
        let msg = CStr::from_ptr(typea_last_error()).to_str().unwrap();
        assert!(msg.contains("invalid"), "{msg}");

        assert_eq!(typea_quantum_cubic(ptr::null_mut()), TypeaStatus::NullPointer);
        let order = CString::new("lex:x>y").unwrap();
        assert_eq!(typea_groebner(ptr::null(), order.as_ptr(), &mut report), TypeaStatus::NullPointer);

        let bad = CString::new("basis oops").unwrap();
        let mut alg = ptr::null_mut();
        assert_eq!(typea_ainf_from_text(bad.as_ptr(), &mut alg), TypeaStatus::Parse);
        assert!(alg.is_null());

        assert!(!typea_report_passed(ptr::null()));
        typea_report_free(ptr::null_mut());
        typea_ainf_free(ptr::null_mut());
        typea_string_free(ptr::null_mut());
    }
}

#[test]
fn groebner_and_clifford() {
    unsafe {
        let text = CString::new("x^2 - y; x*y - 1").unwrap();
        let order = CString::new("lex:x>y").unwrap();
        let mut report = ptr::null_mut();
        assert_eq!(typea_groebner(text.as_ptr(), order.as_ptr(), &mut report), TypeaStatus::Ok);
        assert!(typea_report_passed(report));
        typea_report_free(report);

        let form = CString::new("diag:1,1").unwrap();
        assert_eq!(typea_clifford_hh(form.as_ptr(), 3, false, &mut report), TypeaStatus::Ok);
        assert!(typea_report_passed(report));
        typea_report_free(report);
    }
}

#[test]
fn minimal_model_tables_round_trip() {
    unsafe {
        let mut report = ptr::null_mut();
        let mut alg = ptr::null_mut();
        assert_eq!(typea_minimal_model(4, 2, 1, 3, false, &mut report, &mut alg), TypeaStatus::Ok);
        assert!(typea_report_passed(report));
        typea_report_free(report);
        assert_eq!(typea_ainf_dim(alg), 16);

        let mut text = ptr::null_mut();
        assert_eq!(typea_ainf_to_text(alg, &mut text), TypeaStatus::Ok);
        let text = CString::new(take_string(text)).unwrap();
        let mut again = ptr::null_mut();
        assert_eq!(typea_ainf_from_text(text.as_ptr(), &mut again), TypeaStatus::Ok);
        assert_eq!(typea_ainf_verify(again, 0, &mut report), TypeaStatus::Ok);
        assert!(typea_report_passed(report));
        typea_report_free(report);
        typea_ainf_free(again);
        typea_ainf_free(alg);
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/typea.h")).unwrap();
    for name in ["typea_last_error", "typea_report_json", "typea_minimal_model", "typea_ainf_verify", "typedef struct TypeaReport TypeaReport", "TYPEA_STATUS_PANIC"] {
        assert!(header.contains(name), "{name}");
    }
}
