//! C ABI over `spectral-complexity`.
//!
//! Objects are opaque heap handles created by `spc_*_new`/`spc_*_build`
//! style calls and released with the matching `spc_*_free`. Every fallible
//! call returns an [`SpcStatus`]; on failure a message is kept per thread and
//! can be read with [`spc_last_error_message`]. Panics are caught at the
//! boundary and reported as `SPC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spectral_complexity::graph::GraphError;
use spectral_complexity::pipeline::parse_zero_table;
use spectral_complexity::{
    build_hierarchy_with, compute_spectrum, counting_function, unfold, AlphaStrategy, Anchor,
    BootstrapHierarchy, CountingModel, Degree, HierarchyLevel, HierarchyOptions, QuantumGraph,
    RegularityCriterion, SpectralSequence,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Input could not be parsed.
    Parse = 3,
    /// Sequence is not strictly increasing, too short or out of domain.
    Sequence = 4,
    /// Numerical failure: non-convergence, tracking loss, quadrature.
    Numeric = 5,
    Io = 6,
    /// Caller buffer is too small; the required length was written.
    BufferTooSmall = 7,
    Panic = 99,
}

/// Validated, strictly increasing eigenvalue sequence.
pub struct SpcSequence(SpectralSequence);

/// Separating-level hierarchy of an unfolded sequence.
pub struct SpcHierarchy(BootstrapHierarchy);

/// Metric graph with Kirchhoff vertices.
pub struct SpcGraph(QuantumGraph);

/// Counting model used for unfolding.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpcModelKind {
    RiemannVonMangoldt = 0,
    /// `L0·k/π + offset`.
    WeylLinear = 1,
    LocalSpacing = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SpcModel {
    pub kind: SpcModelKind,
    pub total_length: f64,
    pub offset: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpcStrategyKind {
    Midpoint = 0,
    OptimalMidrange = 1,
    OptimalFirstElement = 2,
    OptimalMean = 3,
}

/// Degree reported when the hierarchy hit its depth limit.
pub const SPC_NOT_TERMINATED: i64 = -1;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (SpcStatus, String);

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> SpcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            SpcStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    (SpcStatus::NullPointer, format!("{what} is null"))
}

fn fail<E: std::fmt::Display>(status: SpcStatus) -> impl FnOnce(E) -> Failure {
    move |e| (status, e.to_string())
}

fn graph_status(e: &GraphError) -> SpcStatus {
    match e {
        GraphError::Spec(_) => SpcStatus::Parse,
        GraphError::Io(_) => SpcStatus::Io,
        GraphError::Sequence(_) => SpcStatus::Sequence,
        GraphError::Empty
        | GraphError::BadVertex { .. }
        | GraphError::BadLength(_)
        | GraphError::Disconnected
        | GraphError::Boundary(_)
        | GraphError::BadMomentum(_)
        | GraphError::CutoffTooLarge { .. } => SpcStatus::InvalidArgument,
        _ => SpcStatus::Numeric,
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies `src` into `buf` when it fits; `written` always receives `src.len()`.
unsafe fn copy_out(
    src: &[f64],
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> Result<(), Failure> {
    if written.is_null() {
        return Err(null("written"));
    }
    *written = src.len();
    if cap < src.len() {
        return Err((
            SpcStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", src.len()),
        ));
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(null("buffer"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SpcStatus::Parse, format!("{what} is not valid UTF-8")))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next `spc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn spc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn spc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a sequence from `len` strictly increasing finite values.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spc_sequence_new(
    values: *const f64,
    len: usize,
    out: *mut *mut SpcSequence,
) -> SpcStatus {
    guard(|| {
        let v = slice(values, len, "values")?.to_vec();
        let s = SpectralSequence::new(v, "ffi").map_err(fail(SpcStatus::Sequence))?;
        store(out, SpcSequence(s))
    })
}

/// Parses a table with one value per line (`#` comments allowed).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spc_sequence_parse(
    text: *const c_char,
    out: *mut *mut SpcSequence,
) -> SpcStatus {
    guard(|| {
        let t = c_str(text, "text")?;
        let table = parse_zero_table(t.as_bytes()).map_err(fail(SpcStatus::Parse))?;
        store(out, SpcSequence(table.sequence))
    })
}

/// # Safety
/// `seq` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spc_sequence_len(seq: *const SpcSequence, out: *mut usize) -> SpcStatus {
    guard(|| {
        let s = deref(seq, "sequence")?;
        *out.as_mut().ok_or_else(|| null("out"))? = s.0.len();
        Ok(())
    })
}

/// Copies the values into `buf` (capacity `cap`). `written` receives the
/// sequence length even when the buffer is too small.
///
/// # Safety
/// `seq` must be a live handle; `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn spc_sequence_values(
    seq: *const SpcSequence,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> SpcStatus {
    guard(|| copy_out(deref(seq, "sequence")?.0.values(), buf, cap, written))
}

/// # Safety
/// `seq` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spc_sequence_free(seq: *mut SpcSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

fn counting_model(m: &SpcModel) -> CountingModel {
    match m.kind {
        SpcModelKind::RiemannVonMangoldt => CountingModel::RiemannVonMangoldt,
        SpcModelKind::WeylLinear => CountingModel::WeylLinear {
            total_length: m.total_length,
            offset: m.offset,
        },
        SpcModelKind::LocalSpacing => CountingModel::LocalSpacing,
    }
}

fn alpha_strategy(kind: SpcStrategyKind) -> AlphaStrategy {
    let anchor = match kind {
        SpcStrategyKind::Midpoint => return AlphaStrategy::Midpoint,
        SpcStrategyKind::OptimalMidrange => Anchor::Midrange,
        SpcStrategyKind::OptimalFirstElement => Anchor::FirstElement,
        SpcStrategyKind::OptimalMean => Anchor::Mean,
    };
    AlphaStrategy::Optimal { anchor }
}

/// Unfolds `seq` with `model` and builds the hierarchy up to `max_depth`
/// separating levels.
///
/// # Safety
/// `seq` and `model` must be valid pointers; `out` must be writable.
/// `strategy` and `model->kind` must hold declared enumerators.
#[no_mangle]
pub unsafe extern "C" fn spc_hierarchy_build(
    seq: *const SpcSequence,
    model: *const SpcModel,
    strategy: SpcStrategyKind,
    max_depth: usize,
    out: *mut *mut SpcHierarchy,
) -> SpcStatus {
    guard(|| {
        let s = deref(seq, "sequence")?;
        let m = counting_model(deref(model, "model")?);
        if max_depth == 0 {
            return Err((
                SpcStatus::InvalidArgument,
                "max_depth must be positive".into(),
            ));
        }
        let u = unfold(&s.0, &m).map_err(fail(SpcStatus::Sequence))?;
        let h = build_hierarchy_with(
            HierarchyLevel::from_unfolded(&u),
            &HierarchyOptions {
                strategy: alpha_strategy(strategy),
                max_depth,
                criterion: RegularityCriterion::Spread,
            },
        )
        .map_err(fail(SpcStatus::Numeric))?;
        store(out, SpcHierarchy(h))
    })
}

/// Irregularity degree, or [`SPC_NOT_TERMINATED`].
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spc_hierarchy_degree(h: *const SpcHierarchy, out: *mut i64) -> SpcStatus {
    guard(|| {
        let h = deref(h, "hierarchy")?;
        *out.as_mut().ok_or_else(|| null("out"))? = match h.0.degree {
            Degree::Terminated(r) => r as i64,
            Degree::NotTerminated => SPC_NOT_TERMINATED,
        };
        Ok(())
    })
}

/// Offset `γ` of the regular level; NaN when the hierarchy did not terminate.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spc_hierarchy_gamma(h: *const SpcHierarchy, out: *mut f64) -> SpcStatus {
    guard(|| {
        let h = deref(h, "hierarchy")?;
        *out.as_mut().ok_or_else(|| null("out"))? = h.0.gamma_reg.unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Number of levels including the unfolded sequence itself.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spc_hierarchy_level_count(
    h: *const SpcHierarchy,
    out: *mut usize,
) -> SpcStatus {
    guard(|| {
        let h = deref(h, "hierarchy")?;
        *out.as_mut().ok_or_else(|| null("out"))? = h.0.levels.len();
        Ok(())
    })
}

/// Copies level `j` into `buf`; see [`spc_sequence_values`].
///
/// # Safety
/// `h` must be a live handle; `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn spc_hierarchy_level_values(
    h: *const SpcHierarchy,
    j: usize,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> SpcStatus {
    guard(|| {
        let h = deref(h, "hierarchy")?;
        let level = h.0.levels.get(j).ok_or_else(|| {
            (
                SpcStatus::InvalidArgument,
                format!("level {j} out of range ({} levels)", h.0.levels.len()),
            )
        })?;
        copy_out(level.values(), buf, cap, written)
    })
}

/// Spread `max δ − min δ` of level `j`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spc_hierarchy_level_spread(
    h: *const SpcHierarchy,
    j: usize,
    out: *mut f64,
) -> SpcStatus {
    guard(|| {
        let h = deref(h, "hierarchy")?;
        let level = h.0.levels.get(j).ok_or_else(|| {
            (
                SpcStatus::InvalidArgument,
                format!("level {j} out of range"),
            )
        })?;
        *out.as_mut().ok_or_else(|| null("out"))? = level.spread();
        Ok(())
    })
}

/// JSON summary of the hierarchy. Release with [`spc_string_free`].
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spc_hierarchy_report_json(
    h: *const SpcHierarchy,
    out: *mut *mut c_char,
) -> SpcStatus {
    guard(|| {
        let h = deref(h, "hierarchy")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let json = serde_json_string(&h.0)?;
        *out = CString::new(json)
            .map_err(fail(SpcStatus::Numeric))?
            .into_raw();
        Ok(())
    })
}

fn serde_json_string(h: &BootstrapHierarchy) -> Result<String, Failure> {
    let mut buf = Vec::new();
    spectral_complexity::pipeline::emit_report_json(&h.report(), &mut buf)
        .map_err(fail(SpcStatus::Numeric))?;
    String::from_utf8(buf).map_err(fail(SpcStatus::Numeric))
}

/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spc_hierarchy_free(h: *mut SpcHierarchy) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a graph spec (`{"vertices": n, "bonds": [{"from", "to",
/// "length"}]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spc_graph_from_json(
    json: *const c_char,
    out: *mut *mut SpcGraph,
) -> SpcStatus {
    guard(|| {
        let t = c_str(json, "json")?;
        let g = QuantumGraph::from_json(t).map_err(|e| (graph_status(&e), e.to_string()))?;
        store(out, SpcGraph(g))
    })
}

/// Graph with `bond_count` bonds `from[i] – to[i]` of length `lengths[i]`.
///
/// # Safety
/// The three arrays must each hold `bond_count` elements; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn spc_graph_new(
    vertex_count: usize,
    from: *const usize,
    to: *const usize,
    lengths: *const f64,
    bond_count: usize,
    out: *mut *mut SpcGraph,
) -> SpcStatus {
    guard(|| {
        if bond_count > 0 && (from.is_null() || to.is_null()) {
            return Err(null("bond endpoints"));
        }
        let l = slice(lengths, bond_count, "lengths")?;
        let edges: Vec<(usize, usize, f64)> = (0..bond_count)
            .map(|i| (*from.add(i), *to.add(i), l[i]))
            .collect();
        let g = QuantumGraph::from_edges(vertex_count, &edges)
            .map_err(|e| (graph_status(&e), e.to_string()))?;
        store(out, SpcGraph(g))
    })
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spc_graph_total_length(g: *const SpcGraph, out: *mut f64) -> SpcStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        *out.as_mut().ok_or_else(|| null("out"))? = g.0.total_length();
        Ok(())
    })
}

/// Number of eigenvalues in `(0, k]`, counted with multiplicity.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spc_graph_counting(
    g: *const SpcGraph,
    k: f64,
    out: *mut u64,
) -> SpcStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let n = counting_function(&g.0, k).map_err(|e| (graph_status(&e), e.to_string()))?;
        *out.as_mut().ok_or_else(|| null("out"))? = n;
        Ok(())
    })
}

/// Distinct eigenvalues in `(0, k_max]`. Degenerate values appear once.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spc_graph_spectrum(
    g: *const SpcGraph,
    k_max: f64,
    out: *mut *mut SpcSequence,
) -> SpcStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let s = compute_spectrum(&g.0, k_max).map_err(|e| (graph_status(&e), e.to_string()))?;
        store(out, SpcSequence(s))
    })
}

/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spc_graph_free(g: *mut SpcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}
