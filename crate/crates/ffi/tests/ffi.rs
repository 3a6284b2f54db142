use std::ffi::{CStr, CString};
use std::ptr;

use xcube_ffi::*;

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { xc_string_free(p) };
    s
}

fn last_error() -> String {
    let p = xc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn lattice(lx: usize, ly: usize, lz: usize, boundary: u32) -> *mut XcLattice {
    let mut l = ptr::null_mut();
    assert_eq!(unsafe { xc_lattice_new(lx, ly, lz, boundary, &mut l) }, XcStatus::Ok);
    l
}

#[test]
fn lattice_handle() {
    let l = lattice(2, 2, 2, XcBoundary::Periodic as u32);
    let (mut code, mut anc) = (0, 0);
    assert_eq!(unsafe { xc_lattice_counts(l, &mut code, &mut anc) }, XcStatus::Ok);
    assert_eq!((code, anc), (24, 8));
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { xc_lattice_json(l, &mut s) }, XcStatus::Ok);
    let doc: serde_json::Value = serde_json::from_str(&take_string(s)).unwrap();
    assert_eq!(doc["schema"], "xcube.lattice/v1");
    unsafe { xc_lattice_free(l) };
}

#[test]
fn invalid_spec_and_nulls() {
    let mut l = ptr::null_mut();
    assert_eq!(unsafe { xc_lattice_new(1, 2, 2, 0, &mut l) }, XcStatus::InvalidSpec);
    assert!(l.is_null());
    assert!(last_error().contains("lx"));
    assert_eq!(unsafe { xc_lattice_new(2, 2, 2, 9, &mut l) }, XcStatus::InvalidArgument);
    assert_eq!(unsafe { xc_lattice_new(2, 2, 2, 0, ptr::null_mut()) }, XcStatus::NullPointer);
    let (mut a, mut b) = (0, 0);
    assert_eq!(unsafe { xc_lattice_counts(ptr::null(), &mut a, &mut b) }, XcStatus::NullPointer);
    unsafe {
        xc_lattice_free(ptr::null_mut());
        xc_simulation_free(ptr::null_mut());
        xc_string_free(ptr::null_mut());
    }
}

#[test]
fn simulation_lifecycle() {
    let l = lattice(3, 3, 1, XcBoundary::OneStorey as u32);
    let mut sim = ptr::null_mut();
    let st = unsafe { xc_simulation_new(l, XcStrategy::Cz12 as u32, XcMode::PauliFrame as u32, 5, 0, &mut sim) };
    assert_eq!(st, XcStatus::Ok);
    // The simulation shares the lattice; the handle can go first.
    unsafe { xc_lattice_free(l) };

    assert_eq!(unsafe { xc_simulation_correct(sim) }, XcStatus::WrongStage);
    let mut out = [0i8; 9];
    assert_eq!(unsafe { xc_simulation_measure(sim, out.as_mut_ptr(), 4) }, XcStatus::InvalidArgument);
    assert_eq!(unsafe { xc_simulation_measure(sim, out.as_mut_ptr(), out.len()) }, XcStatus::Ok);
    assert!(out.iter().all(|&m| m == 1 || m == -1));
    assert_eq!(unsafe { xc_simulation_correct(sim) }, XcStatus::Ok);
    let mut ok = false;
    assert_eq!(unsafe { xc_simulation_all_plus(sim, &mut ok) }, XcStatus::Ok);
    assert!(ok);

    let ev = CString::new("X:c10:post").unwrap();
    assert_eq!(unsafe { xc_simulation_inject(sim, ev.as_ptr()) }, XcStatus::Ok);
    unsafe { xc_simulation_all_plus(sim, &mut ok) };
    assert!(!ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { xc_simulation_syndromes_json(sim, &mut s) }, XcStatus::Ok);
    let rep: serde_json::Value = serde_json::from_str(&take_string(s)).unwrap();
    assert!(!rep["flipped_cubes"].as_array().unwrap().is_empty());

    let bad = CString::new("X:c10:later").unwrap();
    assert_eq!(unsafe { xc_simulation_inject(sim, bad.as_ptr()) }, XcStatus::InvalidArgument);
    unsafe { xc_simulation_free(sim) };
}

#[test]
fn run_report_matches_core() {
    let l = lattice(2, 2, 2, 0);
    let events = CString::new("Z:c4:post, X:a1:pre").unwrap();
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(xc_run_report_json(l, 0, 0, 3, events.as_ptr(), &mut a), XcStatus::Ok);
        assert_eq!(xc_run_report_json(l, 0, 0, 3, events.as_ptr(), &mut b), XcStatus::Ok);
    }
    let (a, b) = (take_string(a), take_string(b));
    assert_eq!(a, b);
    let r: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(r["schema"], "xcube.run-report/v1");
    assert_eq!(r["injected"].as_array().unwrap().len(), 2);

    let mut c = ptr::null_mut();
    assert_eq!(unsafe { xc_run_report_json(l, 0, 0, 3, ptr::null(), &mut c) }, XcStatus::Ok);
    let r: serde_json::Value = serde_json::from_str(&take_string(c)).unwrap();
    assert_eq!(r["all_plus"], true);

    let out_of_range = CString::new("Z:c400:post").unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { xc_run_report_json(l, 0, 0, 3, out_of_range.as_ptr(), &mut d) }, XcStatus::InvalidArgument);
    unsafe { xc_lattice_free(l) };
}

#[test]
fn header_declares_the_api() {
    let header = include_str!("../include/xcube.h");
    for name in [
        "xc_lattice_new",
        "xc_lattice_free",
        "xc_lattice_counts",
        "xc_lattice_json",
        "xc_simulation_new",
        "xc_simulation_inject",
        "xc_simulation_measure",
        "xc_simulation_correct",
        "xc_simulation_all_plus",
        "xc_simulation_syndromes_json",
        "xc_run_report_json",
        "xc_last_error",
        "xc_string_free",
        "XC_STATUS_INCONSISTENT_RECORD",
        "typedef struct XcLattice XcLattice",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
