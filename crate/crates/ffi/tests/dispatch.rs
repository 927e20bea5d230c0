use std::ffi::{CStr, CString};
use std::ptr;

use cyclepack::flatwall::CaseCertificate;
use cyclepack::io::DispatchBundle;
use cyclepack::selftest::bounded_width_fixture;
use cyclepack_ffi::*;
use serde_json::Value;

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { cp_string_free(s) };
    out
}

#[test]
fn dispatch_output_verifies_through_the_abi() {
    let (d, decomposition) = bounded_width_fixture(2).unwrap();
    let bundle = DispatchBundle { digraph: d.clone(), certificate: CaseCertificate::Dtd { decomposition }, mode: None };
    let json = CString::new(serde_json::to_string(&bundle).unwrap()).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cp_pack_dispatch(json.as_ptr(), 2, &mut out) }, CpStatus::Ok);
    let res: Value = serde_json::from_str(&take(out)).unwrap();
    let cycles = res["cycles"].as_array().unwrap();
    assert_eq!(cycles.len(), 2);

    let dj = CString::new(serde_json::to_string(&d).unwrap()).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { cp_digraph_from_json(dj.as_ptr(), &mut h) }, CpStatus::Ok);
    let packing = serde_json::json!({"cycles": cycles, "claim": {"kind": "distinct-lengths"}});
    let pj = CString::new(packing.to_string()).unwrap();
    let mut ok = false;
    assert_eq!(unsafe { cp_verify_packing(h, pj.as_ptr(), &mut ok, ptr::null_mut()) }, CpStatus::Ok);
    assert!(ok);
    unsafe { cp_digraph_free(h) };
}

#[test]
fn malformed_bundle_is_a_format_error() {
    let json = CString::new(r#"{"digraph": {"n": 1, "arcs": []}}"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cp_pack_dispatch(json.as_ptr(), 1, &mut out) }, CpStatus::Format);
    assert!(out.is_null());
    let msg = unsafe { CStr::from_ptr(cp_last_error()) }.to_str().unwrap();
    assert!(msg.contains("certificate"), "{msg}");
}
