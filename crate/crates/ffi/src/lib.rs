//! C ABI over `xcube-core`.
//!
//! Handles are opaque and owned by the caller once returned. Every function
//! returns an [`XcStatus`]; on failure a message is kept per thread and can
//! be read with [`xc_last_error`]. Strings returned through `out` pointers
//! are heap-allocated and must be released with [`xc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use xcube_core::lattice::{Boundary, Lattice, LatticeSpec};
use xcube_core::protocol::{CorrectionMode, Simulation, Strategy};
use xcube_core::syndrome::{extract_syndromes, inject, ErrorEvent};
use xcube_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSpec = 3,
    InconsistentRecord = 4,
    WrongStage = 5,
    Internal = 6,
    Panic = 7,
}

/// Values accepted by `strategy` parameters.
#[repr(C)]
pub enum XcStrategy {
    Movement = 0,
    Cz12 = 1,
}

/// Values accepted by `mode` parameters.
#[repr(C)]
pub enum XcMode {
    Physical = 0,
    PauliFrame = 1,
}

/// Values accepted by `boundary` parameters.
#[repr(C)]
pub enum XcBoundary {
    Periodic = 0,
    OneStorey = 1,
}

/// Opaque lattice handle.
pub struct XcLattice(Arc<Lattice>);

/// Opaque simulation handle.
pub struct XcSimulation(Simulation);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).expect("nul bytes removed")
    });
    LAST_ERROR.with(|s| *s.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> XcStatus {
    match e {
        Error::InvalidSpec(_) | Error::UndefinedStabilizer { .. } => XcStatus::InvalidSpec,
        Error::InvalidEvent(_) | Error::Parse { .. } => XcStatus::InvalidArgument,
        Error::InconsistentRecord { .. } => XcStatus::InconsistentRecord,
        Error::Stage(_) => XcStatus::WrongStage,
        _ => XcStatus::Internal,
    }
}

fn fail(status: XcStatus, msg: impl Into<String>) -> XcStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), XcStatus>) -> XcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => XcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(XcStatus::Panic, "internal panic"),
    }
}

fn core<T>(r: xcube_core::Result<T>) -> Result<T, XcStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, XcStatus> {
    p.as_ref().ok_or_else(|| fail(XcStatus::NullPointer, "null handle"))
}

unsafe fn deref_mut<'a, T>(p: *mut T) -> Result<&'a mut T, XcStatus> {
    p.as_mut().ok_or_else(|| fail(XcStatus::NullPointer, "null handle"))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), XcStatus> {
    if out.is_null() {
        return Err(fail(XcStatus::NullPointer, "null output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), XcStatus> {
    let c = CString::new(s).map_err(|_| fail(XcStatus::Internal, "string contains nul"))?;
    write_out(out, c.into_raw())
}

fn strategy(v: u32) -> Result<Strategy, XcStatus> {
    match v {
        0 => Ok(Strategy::Movement12),
        1 => Ok(Strategy::Cz12Colored),
        _ => Err(fail(XcStatus::InvalidArgument, format!("unknown strategy {v}"))),
    }
}

fn mode(v: u32) -> Result<CorrectionMode, XcStatus> {
    match v {
        0 => Ok(CorrectionMode::Physical),
        1 => Ok(CorrectionMode::PauliFrame),
        _ => Err(fail(XcStatus::InvalidArgument, format!("unknown correction mode {v}"))),
    }
}

macro_rules! json {
    ($v:expr) => {
        serde_json::to_string($v).map_err(|e| fail(XcStatus::Internal, e.to_string()))
    };
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn xc_last_error() -> *const c_char {
    LAST_ERROR.with(|s| s.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn xc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn xc_lattice_new(
    lx: usize,
    ly: usize,
    lz: usize,
    boundary: u32,
    out: *mut *mut XcLattice,
) -> XcStatus {
    guard(|| {
        let boundary = match boundary {
            0 => Boundary::Periodic3D,
            1 => Boundary::OneStoreyOpen,
            _ => return Err(fail(XcStatus::InvalidArgument, format!("unknown boundary {boundary}"))),
        };
        let spec = core(LatticeSpec::new(lx, ly, lz, boundary))?;
        let l = core(Lattice::build(spec))?;
        write_out(out, Box::into_raw(Box::new(XcLattice(Arc::new(l)))))
    })
}

/// # Safety
/// `l` must be NULL or a handle from [`xc_lattice_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xc_lattice_free(l: *mut XcLattice) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// # Safety
/// `l` must be a live handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn xc_lattice_counts(l: *const XcLattice, code: *mut usize, ancilla: *mut usize) -> XcStatus {
    guard(|| {
        let l = &deref(l)?.0;
        write_out(code, l.code_count())?;
        write_out(ancilla, l.ancilla_count())
    })
}

/// Lattice document as JSON.
///
/// # Safety
/// `l` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xc_lattice_json(l: *const XcLattice, out: *mut *mut c_char) -> XcStatus {
    guard(|| {
        let l = &deref(l)?.0;
        write_string(out, json!(&l.to_document())?)
    })
}

/// Prepare the cluster state. The simulation keeps its own reference to the
/// lattice, so the lattice handle may be freed afterwards.
///
/// # Safety
/// `l` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xc_simulation_new(
    l: *const XcLattice,
    strategy_: u32,
    mode_: u32,
    seed: u64,
    stream: u64,
    out: *mut *mut XcSimulation,
) -> XcStatus {
    guard(|| {
        let l = deref(l)?.0.clone();
        let sim = Simulation::new(l, strategy(strategy_)?, mode(mode_)?, seed, stream);
        write_out(out, Box::into_raw(Box::new(XcSimulation(sim))))
    })
}

/// # Safety
/// `s` must be NULL or a handle from [`xc_simulation_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xc_simulation_free(s: *mut XcSimulation) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Inject an error written as `<X|Y|Z>:<cN|aN>:<pre|post>`.
///
/// # Safety
/// `s` must be a live handle; `event` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn xc_simulation_inject(s: *mut XcSimulation, event: *const c_char) -> XcStatus {
    guard(|| {
        let sim = &mut deref_mut(s)?.0;
        if event.is_null() {
            return Err(fail(XcStatus::NullPointer, "null event"));
        }
        let text = CStr::from_ptr(event).to_str().map_err(|_| fail(XcStatus::InvalidArgument, "event is not UTF-8"))?;
        let e: ErrorEvent = core(text.parse())?;
        core(inject(sim, e))
    })
}

/// Measure every ancilla. Outcomes (+1/−1, ascending ancilla index) are
/// written to `outcomes`, which must hold `len >= ancilla count` entries;
/// pass NULL to skip.
///
/// # Safety
/// `s` must be a live handle; `outcomes` NULL or valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn xc_simulation_measure(s: *mut XcSimulation, outcomes: *mut i8, len: usize) -> XcStatus {
    guard(|| {
        let sim = &mut deref_mut(s)?.0;
        let n = sim.lattice().ancilla_count();
        if !outcomes.is_null() && len < n {
            return Err(fail(XcStatus::InvalidArgument, format!("outcome buffer holds {len}, need {n}")));
        }
        let record = core(sim.measure())?;
        if !outcomes.is_null() {
            ptr::copy_nonoverlapping(record.outcomes.as_ptr(), outcomes, n);
        }
        Ok(())
    })
}

/// Solve for and apply the byproduct correction.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn xc_simulation_correct(s: *mut XcSimulation) -> XcStatus {
    guard(|| {
        let sim = &mut deref_mut(s)?.0;
        core(sim.correct()).map(|_| ())
    })
}

/// Whether every cube and defined star currently has eigenvalue +1.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xc_simulation_all_plus(s: *const XcSimulation, out: *mut bool) -> XcStatus {
    guard(|| {
        let sim = &deref(s)?.0;
        let r = core(sim.verify())?;
        write_out(out, r.all_plus)
    })
}

/// Syndrome report as JSON.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xc_simulation_syndromes_json(s: *const XcSimulation, out: *mut *mut c_char) -> XcStatus {
    guard(|| {
        let sim = &deref(s)?.0;
        let r = core(extract_syndromes(sim))?;
        write_string(out, json!(&r)?)
    })
}

/// Full pipeline run (stream 0) with optional comma-separated error events;
/// writes the run report JSON.
///
/// # Safety
/// `l` must be a live handle; `events` NULL or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn xc_run_report_json(
    l: *const XcLattice,
    strategy_: u32,
    mode_: u32,
    seed: u64,
    events: *const c_char,
    out: *mut *mut c_char,
) -> XcStatus {
    guard(|| {
        let l = &deref(l)?.0;
        let parsed: Vec<ErrorEvent> = if events.is_null() {
            Vec::new()
        } else {
            let text =
                CStr::from_ptr(events).to_str().map_err(|_| fail(XcStatus::InvalidArgument, "events are not UTF-8"))?;
            core(text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect())?
        };
        for e in &parsed {
            core(e.validate(l))?;
        }
        let report = core(xcube_core::cli::run_report(l, strategy(strategy_)?, mode(mode_)?, seed, &parsed))?;
        write_string(out, json!(&report)?)
    })
}
