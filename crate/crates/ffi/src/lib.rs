//! C ABI over `sfvg-core`.
//!
//! Every fallible function returns an [`SfvgStatus`]; on failure a message is
//! kept per thread and can be read with [`sfvg_last_error`]. Graphs and risk
//! series are opaque handles released with their `_free` function. No
//! function unwinds across the boundary: panics become `SFVG_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use sfvg_core::infotheory::{sf_index, weight_pdf, InfoError, SfPoint};
use sfvg_core::ingest::ReturnSeries;
use sfvg_core::visibility::{build_vg_fast, VisibilityError, WeightMode, WeightedVisibilityGraph};
use sfvg_core::windows::{segment_sf, sf_risk_series, RiskParams, RiskSeries, WindowError};

/// Weight mode: signed amplitude difference `y[j] - y[i]`.
pub const SFVG_WEIGHTS_SIGNED: i32 = 0;
/// Weight mode: absolute amplitude difference.
pub const SFVG_WEIGHTS_ABSOLUTE: i32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfvgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonFinite = 3,
    TooShort = 4,
    NoEdges = 5,
    /// Fisher information is zero or the global SF vanishes.
    Degenerate = 6,
    BufferTooSmall = 7,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfvgEdge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfvgSfPoint {
    pub shannon: f64,
    pub fisher: f64,
    pub sf: f64,
}

impl From<SfPoint> for SfvgSfPoint {
    fn from(p: SfPoint) -> Self {
        Self { shannon: p.shannon, fisher: p.fisher, sf: p.sf }
    }
}

/// Weighted natural visibility graph of one segment.
pub struct SfvgGraph {
    inner: WeightedVisibilityGraph,
}

/// Daily SF_R series of one return series.
pub struct SfvgRisk {
    inner: RiskSeries,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(SfvgStatus, String);

impl From<VisibilityError> for Failure {
    fn from(e: VisibilityError) -> Self {
        let status = match e {
            VisibilityError::NonFinite { .. } => SfvgStatus::NonFinite,
            VisibilityError::SegmentTooShort { .. } => SfvgStatus::TooShort,
            _ => SfvgStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<InfoError> for Failure {
    fn from(e: InfoError) -> Self {
        let status = match e {
            InfoError::NoEdges => SfvgStatus::NoEdges,
            InfoError::DegenerateFisher { .. } => SfvgStatus::Degenerate,
            _ => SfvgStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<WindowError> for Failure {
    fn from(e: WindowError) -> Self {
        match e {
            WindowError::Visibility(v) => v.into(),
            WindowError::Info(i) => i.into(),
            WindowError::SeriesTooShort { .. } => Failure(SfvgStatus::TooShort, e.to_string()),
            WindowError::DegenerateGlobal(_) => Failure(SfvgStatus::Degenerate, e.to_string()),
            WindowError::BadWindowParams(_) => Failure(SfvgStatus::InvalidArgument, e.to_string()),
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SfvgStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SfvgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SfvgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SfvgStatus::Panic
        }
    }
}

fn weight_mode(mode: i32) -> Result<WeightMode, Failure> {
    match mode {
        SFVG_WEIGHTS_SIGNED => Ok(WeightMode::Signed),
        SFVG_WEIGHTS_ABSOLUTE => Ok(WeightMode::Absolute),
        other => Err(Failure(SfvgStatus::InvalidArgument, format!("unknown weight mode {other}"))),
    }
}

/// # Safety
/// `values` must point to `len` readable doubles (or be null with `len == 0`).
unsafe fn input<'a>(values: *const f64, len: usize) -> Result<&'a [f64], Failure> {
    if values.is_null() {
        return if len == 0 { Ok(&[]) } else { Err(null("values")) };
    }
    Ok(unsafe { slice::from_raw_parts(values, len) })
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn sfvg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sfvg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds the visibility graph of `values[0..len]` and stores a new handle in
/// `*out`.
///
/// # Safety
/// `values` must point to `len` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sfvg_graph_new(
    values: *const f64,
    len: usize,
    weight_mode_: i32,
    out: *mut *mut SfvgGraph,
) -> SfvgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let segment = unsafe { input(values, len) }?;
        let graph = build_vg_fast(segment, weight_mode(weight_mode_)?)?;
        unsafe { *out = Box::into_raw(Box::new(SfvgGraph { inner: graph })) };
        Ok(())
    })
}

/// # Safety
/// `graph` must be null or a handle from [`sfvg_graph_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sfvg_graph_free(graph: *mut SfvgGraph) {
    if !graph.is_null() {
        drop(unsafe { Box::from_raw(graph) });
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sfvg_graph_node_count(graph: *const SfvgGraph) -> usize {
    unsafe { graph.as_ref() }.map_or(0, |g| g.inner.node_count())
}

/// Number of edges, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sfvg_graph_edge_count(graph: *const SfvgGraph) -> usize {
    unsafe { graph.as_ref() }.map_or(0, |g| g.inner.edge_count())
}

/// Copies the edges, sorted by `(i, j)`, into `buf`, which must hold at least
/// [`sfvg_graph_edge_count`] entries.
///
/// # Safety
/// `graph` must be a live handle; `buf` must have room for `capacity` edges.
#[no_mangle]
pub unsafe extern "C" fn sfvg_graph_edges(graph: *const SfvgGraph, buf: *mut SfvgEdge, capacity: usize) -> SfvgStatus {
    guard(|| {
        let g = unsafe { graph.as_ref() }.ok_or_else(|| null("graph"))?;
        let edges = g.inner.edges();
        if edges.is_empty() {
            return Ok(());
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        if capacity < edges.len() {
            return Err(Failure(
                SfvgStatus::BufferTooSmall,
                format!("buffer holds {capacity} edges, graph has {}", edges.len()),
            ));
        }
        let dst = unsafe { slice::from_raw_parts_mut(buf, edges.len()) };
        for (d, e) in dst.iter_mut().zip(edges) {
            *d = SfvgEdge { i: e.i, j: e.j, w: e.w };
        }
        Ok(())
    })
}

/// SF index of a graph's weight distribution over `bins` bins.
///
/// # Safety
/// `graph` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sfvg_graph_sf(graph: *const SfvgGraph, bins: usize, out: *mut SfvgSfPoint) -> SfvgStatus {
    guard(|| {
        let g = unsafe { graph.as_ref() }.ok_or_else(|| null("graph"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = sf_index(&weight_pdf(&g.inner, bins)?)?.into();
        Ok(())
    })
}

/// SF index of one segment, binned over its own weight range.
///
/// # Safety
/// `values` must point to `len` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sfvg_segment_sf(
    values: *const f64,
    len: usize,
    bins: usize,
    weight_mode_: i32,
    out: *mut SfvgSfPoint,
) -> SfvgStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let segment = unsafe { input(values, len) }?;
        *out = segment_sf(segment, bins, weight_mode(weight_mode_)?, None)?.into();
        Ok(())
    })
}

/// Daily SF_R of a return series with a trailing window of `window` points
/// and default binning. Point `k` covers returns `k .. k + window`.
///
/// # Safety
/// `returns` must point to `len` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sfvg_risk_new(
    returns: *const f64,
    len: usize,
    window: usize,
    bins: usize,
    weight_mode_: i32,
    out: *mut *mut SfvgRisk,
) -> SfvgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let values = unsafe { input(returns, len) }?.to_vec();
        let series = ReturnSeries::from_values("ffi", values)
            .map_err(|e| Failure(SfvgStatus::InvalidArgument, e.to_string()))?;
        let params = RiskParams { window, bins, weights: weight_mode(weight_mode_)?, ..RiskParams::default() };
        let risk = sf_risk_series(&series, &params)?;
        unsafe { *out = Box::into_raw(Box::new(SfvgRisk { inner: risk })) };
        Ok(())
    })
}

/// # Safety
/// `risk` must be null or a handle from [`sfvg_risk_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sfvg_risk_free(risk: *mut SfvgRisk) {
    if !risk.is_null() {
        drop(unsafe { Box::from_raw(risk) });
    }
}

/// Number of SF_R points, or 0 for a null handle.
///
/// # Safety
/// `risk` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sfvg_risk_len(risk: *const SfvgRisk) -> usize {
    unsafe { risk.as_ref() }.map_or(0, |r| r.inner.points.len())
}

/// SF of the whole series, the denominator of every SF_R value; NaN for a
/// null handle.
///
/// # Safety
/// `risk` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sfvg_risk_global_sf(risk: *const SfvgRisk) -> f64 {
    unsafe { risk.as_ref() }.map_or(f64::NAN, |r| r.inner.global_sf.sf)
}

/// Copies the SF_R values into `buf`; undefined points are written as NaN.
///
/// # Safety
/// `risk` must be a live handle; `buf` must have room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn sfvg_risk_values(risk: *const SfvgRisk, buf: *mut f64, capacity: usize) -> SfvgStatus {
    guard(|| {
        let r = unsafe { risk.as_ref() }.ok_or_else(|| null("risk"))?;
        let n = r.inner.points.len();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if capacity < n {
            return Err(Failure(SfvgStatus::BufferTooSmall, format!("buffer holds {capacity} values, series has {n}")));
        }
        let dst = unsafe { slice::from_raw_parts_mut(buf, n) };
        for (d, v) in dst.iter_mut().zip(r.inner.values()) {
            *d = v.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}
