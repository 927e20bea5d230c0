//! C ABI over `cyclepack`.
//!
//! Digraphs cross the boundary as opaque `CpDigraph` handles; everything
//! richer (trains, packings, certificates) travels as JSON strings in the
//! library's file formats. Every call returns a `CpStatus`; on failure
//! `cp_last_error` describes the error on the calling thread. Strings
//! returned through out-pointers belong to the caller and are released
//! with `cp_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cyclepack::flatwall::{theorem_dispatch, TheoremMode};
use cyclepack::io::DispatchBundle;
use cyclepack::oracle::{enum_cycles, verify_packing, CyclePacking};
use cyclepack::trains::find_k_train;
use cyclepack::{selftest, Digraph, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON or a document of the wrong shape.
    Format = 3,
    InvalidArgument = 4,
    /// The input does not meet a pipeline's hypotheses.
    Precondition = 5,
    /// A check ran and rejected its input.
    Failed = 6,
    Internal = 7,
    Panic = 8,
}

/// Opaque digraph handle.
pub struct CpDigraph {
    inner: Digraph,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(CpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Format(_) => CpStatus::Format,
            Error::InvalidArgument(_) => CpStatus::InvalidArgument,
            Error::Precondition(_) | Error::DegreeDeficit { .. } => CpStatus::Precondition,
            Error::Defect(_) => CpStatus::Internal,
            _ => CpStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(CpStatus::Format, e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status plus last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside cyclepack");
            CpStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail(CpStatus::NullArgument, "null string".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Fail(CpStatus::InvalidUtf8, e.to_string()))
}

unsafe fn digraph<'a>(d: *const CpDigraph) -> Result<&'a Digraph, Fail> {
    d.as_ref().map(|h| &h.inner).ok_or_else(|| Fail(CpStatus::NullArgument, "null digraph".into()))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(CpStatus::NullArgument, "null out-pointer".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail(CpStatus::Internal, e.to_string()))?;
    put(out, c.into_raw())
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn cp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn cp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `{"n": .., "arcs": [[t, h], ..]}`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_digraph_from_json(json: *const c_char, out: *mut *mut CpDigraph) -> CpStatus {
    guard(|| {
        let d: Digraph = serde_json::from_str(read_str(json)?)?;
        put(out, Box::into_raw(Box::new(CpDigraph { inner: d })))
    })
}

/// Builds a digraph on `n` vertices from `arc_count` pairs stored flat in
/// `arcs` as tail, head, tail, head, ...
///
/// # Safety
/// `arcs` must point to `2 * arc_count` values (or be null when
/// `arc_count` is 0) and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cp_digraph_from_arcs(
    n: usize,
    arcs: *const usize,
    arc_count: usize,
    out: *mut *mut CpDigraph,
) -> CpStatus {
    guard(|| {
        let flat: &[usize] = if arc_count == 0 {
            &[]
        } else if arcs.is_null() {
            return Err(Fail(CpStatus::NullArgument, "null arc array".into()));
        } else {
            std::slice::from_raw_parts(arcs, 2 * arc_count)
        };
        let pairs: Vec<(usize, usize)> = flat.chunks_exact(2).map(|p| (p[0], p[1])).collect();
        let d = Digraph::build(n, &pairs)?;
        put(out, Box::into_raw(Box::new(CpDigraph { inner: d })))
    })
}

/// # Safety
/// `d` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cp_digraph_free(d: *mut CpDigraph) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_digraph_vertex_count(d: *const CpDigraph) -> usize {
    d.as_ref().map_or(0, |h| h.inner.n())
}

/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_digraph_arc_count(d: *const CpDigraph) -> usize {
    d.as_ref().map_or(0, |h| h.inner.arc_count())
}

/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_digraph_to_json(d: *const CpDigraph, out: *mut *mut c_char) -> CpStatus {
    guard(|| put_string(out, serde_json::to_string(digraph(d)?)?))
}

/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_digraph_to_dot(d: *const CpDigraph, out: *mut *mut c_char) -> CpStatus {
    guard(|| put_string(out, digraph(d)?.to_dot()))
}

/// Number of simple directed cycles; `CP_STATUS_FAILED` when there are
/// more than `limit`.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_count_cycles(d: *const CpDigraph, limit: usize, out: *mut usize) -> CpStatus {
    guard(|| match enum_cycles(digraph(d)?, limit).complete() {
        Some(c) => put(out, c.len()),
        None => Err(Fail(CpStatus::Failed, format!("more than {limit} cycles"))),
    })
}

/// A k-train as `{"spine": [..], "back": [..], "reversed": false}`; needs
/// minimum out-degree at least `k`.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_find_k_train(d: *const CpDigraph, k: usize, out: *mut *mut c_char) -> CpStatus {
    guard(|| {
        let t = find_k_train(digraph(d)?, k)?;
        put_string(out, serde_json::to_string(&t)?)
    })
}

/// Checks a packing `{"cycles": [[..], ..], "claim": {"kind": ..}}`.
/// `*ok` receives the verdict; `report`, if not null, receives the
/// verdict as JSON.
///
/// # Safety
/// `d` must be a live handle, `packing_json` a string, `ok` valid and
/// `report` null or valid.
#[no_mangle]
pub unsafe extern "C" fn cp_verify_packing(
    d: *const CpDigraph,
    packing_json: *const c_char,
    ok: *mut bool,
    report: *mut *mut c_char,
) -> CpStatus {
    guard(|| {
        let p: CyclePacking = serde_json::from_str(read_str(packing_json)?)?;
        let v = verify_packing(digraph(d)?, &p);
        put(ok, v.ok)?;
        if !report.is_null() {
            put_string(report, serde_json::to_string(&v)?)?;
        }
        Ok(())
    })
}

/// Runs the certificate dispatcher on `{"digraph": .., "certificate": ..}`
/// and returns `{"route": .., "cycles": [..]}`. `k = 0` asks for the
/// three-cycle theorem on the non-strong wall route.
///
/// # Safety
/// `bundle_json` must be a string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_pack_dispatch(bundle_json: *const c_char, k: usize, out: *mut *mut c_char) -> CpStatus {
    guard(|| {
        let b: DispatchBundle = serde_json::from_str(read_str(bundle_json)?)?;
        let mode = if k == 0 { TheoremMode::MainSem } else { TheoremMode::MainConn { k } };
        let res = theorem_dispatch(&b.digraph, &b.certificate, mode)?;
        put_string(out, serde_json::to_string(&res)?)
    })
}

/// Runs one acceptance criterion (1..=10).
///
/// # Safety
/// `ok` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_selftest(criterion: usize, ok: *mut bool) -> CpStatus {
    guard(|| {
        let r = selftest::run_criterion(criterion)?;
        put(ok, r.ok)?;
        if r.ok {
            Ok(())
        } else {
            Err(Fail(CpStatus::Failed, r.detail))
        }
    })
}
