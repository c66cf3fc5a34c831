use std::ffi::{CStr, CString};
use std::ptr;

use spectral_complexity_ffi::*;

fn last_error() -> String {
    let p = spc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn sequence(values: &[f64]) -> *mut SpcSequence {
    let mut out = ptr::null_mut();
    let st = unsafe { spc_sequence_new(values.as_ptr(), values.len(), &mut out) };
    assert_eq!(st, SpcStatus::Ok);
    out
}

#[test]
fn sequence_round_trip() {
    let s = sequence(&[1.0, 2.5, 4.0]);
    let mut n = 0;
    unsafe {
        assert_eq!(spc_sequence_len(s, &mut n), SpcStatus::Ok);
        assert_eq!(n, 3);
        let mut buf = [0.0; 2];
        let st = spc_sequence_values(s, buf.as_mut_ptr(), buf.len(), &mut n);
        assert_eq!(st, SpcStatus::BufferTooSmall);
        assert_eq!(n, 3);
        let mut buf = [0.0; 3];
        let st = spc_sequence_values(s, buf.as_mut_ptr(), buf.len(), &mut n);
        assert_eq!(st, SpcStatus::Ok);
        assert_eq!(buf, [1.0, 2.5, 4.0]);
        spc_sequence_free(s);
    }
}

#[test]
fn invalid_input_sets_message() {
    let mut out = ptr::null_mut();
    let v = [2.0, 1.0];
    let st = unsafe { spc_sequence_new(v.as_ptr(), 2, &mut out) };
    assert_eq!(st, SpcStatus::Sequence);
    assert!(out.is_null());
    assert!(last_error().contains("monotonicity"));

    let text = CString::new("1.0\nnope\n").unwrap();
    let st = unsafe { spc_sequence_parse(text.as_ptr(), &mut out) };
    assert_eq!(st, SpcStatus::Parse);
    assert!(last_error().contains("line 2"));

    let st = unsafe { spc_sequence_len(ptr::null(), &mut 0) };
    assert_eq!(st, SpcStatus::NullPointer);
}

#[test]
fn success_clears_last_error() {
    let st = unsafe { spc_sequence_len(ptr::null(), &mut 0) };
    assert_eq!(st, SpcStatus::NullPointer);
    let s = sequence(&[1.0, 2.0]);
    assert!(spc_last_error_message().is_null());
    unsafe { spc_sequence_free(s) };
}

#[test]
fn hierarchy_matches_rust_api() {
    // Lattice with two displaced levels: spread 1.05, one separating level.
    let v: Vec<f64> = (0..20)
        .map(|i| {
            i as f64
                + 0.5
                + match i {
                    7 => 0.45,
                    12 => -0.6,
                    _ => 0.0,
                }
        })
        .collect();
    let v: Vec<f64> = v.iter().map(|x| x * 0.37).collect();
    let s = sequence(&v);
    let model = SpcModel {
        kind: SpcModelKind::WeylLinear,
        total_length: std::f64::consts::PI / 0.37,
        offset: 0.0,
    };
    let mut h = ptr::null_mut();
    unsafe {
        let st = spc_hierarchy_build(s, &model, SpcStrategyKind::OptimalMidrange, 16, &mut h);
        assert_eq!(st, SpcStatus::Ok);
        let mut degree = -5;
        assert_eq!(spc_hierarchy_degree(h, &mut degree), SpcStatus::Ok);
        let mut count = 0;
        assert_eq!(spc_hierarchy_level_count(h, &mut count), SpcStatus::Ok);
        assert_eq!(count as i64, degree + 1);
        assert_eq!(degree, 1);
        let mut spread = 0.0;
        assert_eq!(spc_hierarchy_level_spread(h, 1, &mut spread), SpcStatus::Ok);
        assert!(spread <= 1.0 + 1e-12);
        let mut gamma = f64::NAN;
        assert_eq!(spc_hierarchy_gamma(h, &mut gamma), SpcStatus::Ok);
        assert!(gamma.is_finite());

        let mut buf = vec![0.0; 19];
        let mut n = 0;
        let st = spc_hierarchy_level_values(h, 1, buf.as_mut_ptr(), buf.len(), &mut n);
        assert_eq!(st, SpcStatus::Ok);
        assert_eq!(n, 19);
        assert!(buf.windows(2).all(|w| w[0] < w[1]));
        let st = spc_hierarchy_level_values(h, 9, buf.as_mut_ptr(), buf.len(), &mut n);
        assert_eq!(st, SpcStatus::InvalidArgument);

        let mut json = ptr::null_mut();
        assert_eq!(spc_hierarchy_report_json(h, &mut json), SpcStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        spc_string_free(json);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["degree"], 1);
        assert_eq!(parsed["levels"].as_array().unwrap().len(), 2);

        spc_hierarchy_free(h);
        spc_sequence_free(s);
    }
}

#[test]
fn zero_depth_is_rejected() {
    let s = sequence(&[1.0, 2.0, 3.0]);
    let model = SpcModel {
        kind: SpcModelKind::WeylLinear,
        total_length: std::f64::consts::PI,
        offset: 0.0,
    };
    let mut h = ptr::null_mut();
    let st = unsafe { spc_hierarchy_build(s, &model, SpcStrategyKind::Midpoint, 0, &mut h) };
    assert_eq!(st, SpcStatus::InvalidArgument);
    unsafe { spc_sequence_free(s) };
}

#[test]
fn single_bond_graph() {
    let json = CString::new(r#"{"vertices":2,"bonds":[{"from":0,"to":1,"length":1.0}]}"#).unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(spc_graph_from_json(json.as_ptr(), &mut g), SpcStatus::Ok);
        let mut l0 = 0.0;
        assert_eq!(spc_graph_total_length(g, &mut l0), SpcStatus::Ok);
        assert_eq!(l0, 1.0);
        // Neumann interval of length 1: k = nπ.
        let mut n = 0;
        assert_eq!(spc_graph_counting(g, 10.0, &mut n), SpcStatus::Ok);
        assert_eq!(n, 3);
        let mut s = ptr::null_mut();
        assert_eq!(spc_graph_spectrum(g, 10.0, &mut s), SpcStatus::Ok);
        let mut buf = [0.0; 3];
        let mut len = 0;
        assert_eq!(
            spc_sequence_values(s, buf.as_mut_ptr(), 3, &mut len),
            SpcStatus::Ok
        );
        for (i, k) in buf.iter().enumerate() {
            assert!((k - (i + 1) as f64 * std::f64::consts::PI).abs() < 1e-8);
        }
        spc_sequence_free(s);
        spc_graph_free(g);
    }
}

#[test]
fn graph_from_arrays_and_errors() {
    let from = [0usize, 1, 2];
    let to = [1usize, 2, 0];
    let len = [1.0, 1.5, 2.0];
    let mut g = ptr::null_mut();
    unsafe {
        let st = spc_graph_new(3, from.as_ptr(), to.as_ptr(), len.as_ptr(), 3, &mut g);
        assert_eq!(st, SpcStatus::Ok);
        spc_graph_free(g);
        let bad = [1.0, -1.0, 2.0];
        let st = spc_graph_new(3, from.as_ptr(), to.as_ptr(), bad.as_ptr(), 3, &mut g);
        assert_eq!(st, SpcStatus::InvalidArgument);
        let text = CString::new("{not json").unwrap();
        assert_eq!(spc_graph_from_json(text.as_ptr(), &mut g), SpcStatus::Parse);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(spc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
