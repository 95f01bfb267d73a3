//! C interface to `rlw-core`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and released
//! with the matching `*_free`. Every fallible call returns an [`RlwStatus`]; on failure
//! the message is available from [`rlw_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use rlw_core::group::GroupElement;
use rlw_core::lw_data::{closure, load_data, parse_family, validate, LwData};
use rlw_core::operators::{Model, ProbePolicy};
use rlw_core::state_space::SpaceOptions;
use rlw_core::surface::{RibbonGraph, SurfaceSpec};
use rlw_core::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlwStatus {
    Ok = 0,
    NullArgument = 1,
    Parse = 2,
    Io = 3,
    Domain = 4,
    MissingData = 5,
    Admissibility = 6,
    NoProbe = 7,
    DimensionCap = 8,
    Numerical = 9,
    Topology = 10,
    Other = 11,
    Panic = 12,
}

/// Local data handle.
pub struct RlwData(Box<dyn LwData>);

/// Ribbon graph handle.
pub struct RlwGraph(RibbonGraph);

/// Outcome of [`rlw_data_validate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RlwValidation {
    pub passed: bool,
    pub checks: usize,
    pub failed: usize,
    pub max_residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> RlwStatus {
    match e {
        Error::Parse(_) | Error::Json(_) | Error::Shape(_) | Error::GroupArithmetic(_) => RlwStatus::Parse,
        Error::Io(_) => RlwStatus::Io,
        Error::Domain(_) => RlwStatus::Domain,
        Error::MissingData(_) | Error::Index(_) => RlwStatus::MissingData,
        Error::Admissibility { .. } | Error::GaugeAdmissibility(_) => RlwStatus::Admissibility,
        Error::NoProbe { .. } => RlwStatus::NoProbe,
        Error::DimensionCap { .. } => RlwStatus::DimensionCap,
        Error::Instability(_) => RlwStatus::Numerical,
        Error::Topology(_) => RlwStatus::Topology,
        #[allow(unreachable_patterns)]
        _ => RlwStatus::Other,
    }
}

enum Fail {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

/// Runs `f`, records any failure and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RlwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            RlwStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null argument: {what}"));
            RlwStatus::NullArgument
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            RlwStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Core(Error::Parse(format!("{what} is not UTF-8"))))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn elements(data: &dyn LwData, list: &str) -> Result<Vec<GroupElement>, Error> {
    let sig = data.signature();
    list.split(',').filter(|s| !s.trim().is_empty()).map(|s| sig.parse(s.trim())).collect()
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rlw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds data from a family selector such as `P:3:2` or `F:2:1:2`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rlw_data_from_family(spec: *const c_char, out: *mut *mut RlwData) -> RlwStatus {
    guard(|| {
        let family = parse_family(text(spec, "spec")?)?;
        store(out, RlwData(Box::new(family)))
    })
}

/// Loads a data file (table or family selector).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rlw_data_from_file(path: *const c_char, out: *mut *mut RlwData) -> RlwStatus {
    guard(|| {
        let data = load_data(Path::new(text(path, "path")?))?;
        store(out, RlwData(data))
    })
}

/// # Safety
/// `data` must come from an `rlw_data_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rlw_data_free(data: *mut RlwData) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Runs the axiom suite over the closure of a comma-separated degree list.
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlw_data_validate(
    data: *const RlwData,
    degrees: *const c_char,
    tol: f64,
    out: *mut RlwValidation,
) -> RlwStatus {
    guard(|| {
        let data = handle(data, "data")?;
        let samples = elements(data.0.as_ref(), text(degrees, "degrees")?)?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let report = validate(data.0.as_ref(), &samples, tol);
        *out = RlwValidation {
            passed: report.passed(),
            checks: report.checks.len(),
            failed: report.checks.iter().filter(|c| !c.pass).count(),
            max_residual: report.max_residual(),
        };
        Ok(())
    })
}

/// Builds a surface from `torus:theta`, `torus:grid:N` or `genus:G`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rlw_graph_from_spec(spec: *const c_char, out: *mut *mut RlwGraph) -> RlwStatus {
    guard(|| {
        let graph = SurfaceSpec::parse(text(spec, "spec")?)?.build()?;
        store(out, RlwGraph(graph))
    })
}

/// # Safety
/// `graph` must come from [`rlw_graph_from_spec`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rlw_graph_free(graph: *mut RlwGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Writes vertex, edge and plaquette counts and the genus into `counts[0..4]`.
///
/// # Safety
/// `counts` must point to four writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn rlw_graph_counts(graph: *const RlwGraph, counts: *mut usize) -> RlwStatus {
    guard(|| {
        let g = &handle(graph, "graph")?.0;
        if counts.is_null() {
            return Err(Fail::Null("counts"));
        }
        let vals = [g.num_vertices(), g.num_edges(), g.num_plaquettes(), g.genus()];
        ptr::copy_nonoverlapping(vals.as_ptr(), counts, 4);
        Ok(())
    })
}

/// Ground-state degeneracy for the coloring with the given holonomies
/// (comma-separated, one per basis cycle), using automatic probes.
///
/// # Safety
/// Pointers must be valid; `dim` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlw_ground_dim(
    data: *const RlwData,
    graph: *const RlwGraph,
    holonomy: *const c_char,
    strict_fusion: bool,
    tol: f64,
    dim: *mut usize,
) -> RlwStatus {
    guard(|| {
        let data = handle(data, "data")?.0.as_ref();
        let graph = &handle(graph, "graph")?.0;
        let hol = elements(data, text(holonomy, "holonomy")?)?;
        if dim.is_null() {
            return Err(Fail::Null("dim"));
        }
        let model = Model::new(graph, data, SpaceOptions { strict_fusion, ..Default::default() })?;
        let phi = model.holonomy_coloring_with(&hol, &closure(data, &hol))?;
        let space = model.space(&phi)?;
        let probes = model.probes(&phi, &ProbePolicy::Auto)?;
        *dim = model.ground_dim(&space, &probes, tol)?.dim;
        Ok(())
    })
}
