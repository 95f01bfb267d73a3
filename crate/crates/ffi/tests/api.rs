use std::ffi::{CStr, CString};
use std::ptr;

use rlw_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rlw_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn ground_dim_through_handles() {
    unsafe {
        let mut data = ptr::null_mut();
        assert_eq!(rlw_data_from_family(c("P:3:2").as_ptr(), &mut data), RlwStatus::Ok);
        let mut graph = ptr::null_mut();
        assert_eq!(rlw_graph_from_spec(c("torus:theta").as_ptr(), &mut graph), RlwStatus::Ok);
        let mut counts = [0usize; 4];
        assert_eq!(rlw_graph_counts(graph, counts.as_mut_ptr()), RlwStatus::Ok);
        assert_eq!(counts, [2, 3, 1, 1]);
        let mut dim = 0;
        let st = rlw_ground_dim(data, graph, c("1/5,2/5").as_ptr(), false, 1e-9, &mut dim);
        assert_eq!(st, RlwStatus::Ok, "{}", last_error());
        assert_eq!(dim, 9);
        assert!(last_error().is_empty());

        let st = rlw_ground_dim(data, graph, c("1/2,1/5").as_ptr(), false, 1e-9, &mut dim);
        assert_eq!(st, RlwStatus::Admissibility);
        assert!(last_error().contains("1/2"), "{}", last_error());
        rlw_graph_free(graph);
        rlw_data_free(data);
    }
}

#[test]
fn validation_summary() {
    unsafe {
        let mut data = ptr::null_mut();
        assert_eq!(rlw_data_from_family(c("M:2:1").as_ptr(), &mut data), RlwStatus::Ok);
        let mut v = RlwValidation::default();
        assert_eq!(rlw_data_validate(data, c("1/5,1/7").as_ptr(), 1e-12, &mut v), RlwStatus::Ok);
        assert!(v.passed && v.failed == 0 && v.checks >= 10, "{v:?}");
        assert!(v.max_residual <= 1e-12);
        rlw_data_free(data);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut data = ptr::null_mut();
        assert_eq!(rlw_data_from_family(c("Q:2:1").as_ptr(), &mut data), RlwStatus::Parse);
        assert!(data.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(rlw_data_from_family(ptr::null(), &mut data), RlwStatus::NullArgument);
        assert_eq!(rlw_data_from_file(c("/nonexistent/rlw.json").as_ptr(), &mut data), RlwStatus::Io);
        let mut graph = ptr::null_mut();
        assert_eq!(rlw_graph_from_spec(c("sphere").as_ptr(), &mut graph), RlwStatus::Parse);
        let mut dim = 0;
        assert_eq!(rlw_ground_dim(ptr::null(), ptr::null(), ptr::null(), false, 1e-9, &mut dim), RlwStatus::NullArgument);
        rlw_data_free(ptr::null_mut());
        rlw_graph_free(ptr::null_mut());
    }
}

#[test]
fn header_is_generated() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/rlw.h")).unwrap();
    for sym in ["rlw_last_error", "rlw_data_from_family", "rlw_ground_dim", "typedef struct RlwData RlwData", "RLW_STATUS_OK"] {
        assert!(h.contains(sym), "header lacks {sym}");
    }
}
