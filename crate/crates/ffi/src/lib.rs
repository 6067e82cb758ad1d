//! C ABI for `truss-core`.
//!
//! A [`TrussEngine`] owns a graph and its truss numbers and is driven through
//! `truss_*` functions. Vertices are addressed by caller-chosen `uint64_t`
//! labels; the engine maps them to dense ids internally. Every fallible call
//! returns a [`TrussStatus`]; on failure [`truss_last_error`] describes what
//! went wrong on the calling thread.
//!
//! The generated header is `include/truss.h`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use truss_core::stream::{build_prefix, load_temporal_file, Fraction};
use truss_core::{DynamicTruss, LevelOrder, Rejection, TrussError, Variant, VertexId};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrussStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The edge is already in the graph.
    Duplicate = 3,
    SelfLoop = 4,
    UnknownEdge = 5,
    Io = 6,
    Parse = 7,
    /// The output buffer is too small; the required length was written.
    BufferTooSmall = 8,
    /// Truss numbers disagree with a full recompute.
    VerificationFailed = 9,
    Panic = 10,
}

/// Values accepted by the `variant` argument of the constructors.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrussVariant {
    Hcqty = 0,
    JkInc = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrussEdge {
    pub u: u64,
    pub v: u64,
    pub k: u32,
}

/// Opaque engine handle.
pub struct TrussEngine {
    inner: DynamicTruss,
    labels: Vec<u64>,
    ids: HashMap<u64, VertexId>,
}

impl TrussEngine {
    fn new(variant: Variant) -> TrussEngine {
        TrussEngine {
            inner: DynamicTruss::new(variant),
            labels: Vec::new(),
            ids: HashMap::new(),
        }
    }

    fn intern(&mut self, label: u64) -> VertexId {
        let next = VertexId(self.labels.len() as u32);
        let labels = &mut self.labels;
        *self.ids.entry(label).or_insert_with(|| {
            labels.push(label);
            next
        })
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: TrussStatus, message: impl Into<String>) -> TrussStatus {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(text).ok());
    status
}

fn from_error(e: TrussError) -> TrussStatus {
    let status = match &e {
        TrussError::UnknownEdge(..) => TrussStatus::UnknownEdge,
        TrussError::Parse { .. } | TrussError::Json(_) | TrussError::Csv(_) => TrussStatus::Parse,
        TrussError::InvalidParameter(_) => TrussStatus::InvalidArgument,
        TrussError::StateMismatch { .. } => TrussStatus::VerificationFailed,
        TrussError::Io { .. } | TrussError::Stream(_) => TrussStatus::Io,
    };
    fail(status, e.to_string())
}

fn guard<F>(body: F) -> TrussStatus
where
    F: FnOnce() -> TrussStatus,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(TrussStatus::Panic, message)
        }
    }
}

fn variant_of(raw: u32) -> Option<Variant> {
    match raw {
        0 => Some(Variant::Hcqty),
        1 => Some(Variant::JkInc),
        _ => None,
    }
}

macro_rules! engine_ref {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(e) => e,
            None => return fail(TrussStatus::NullPointer, "engine is null"),
        }
    };
}

macro_rules! engine_mut {
    ($ptr:expr) => {
        match unsafe { $ptr.as_mut() } {
            Some(e) => e,
            None => return fail(TrussStatus::NullPointer, "engine is null"),
        }
    };
}

/// Message for the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn truss_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates an empty engine. `variant` is a [`TrussVariant`] value.
///
/// # Safety
/// `out` must be null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn truss_engine_new(variant: u32, out: *mut *mut TrussEngine) -> TrussStatus {
    guard(|| {
        if out.is_null() {
            return fail(TrussStatus::NullPointer, "out is null");
        }
        let Some(variant) = variant_of(variant) else {
            return fail(TrussStatus::InvalidArgument, format!("unknown variant {variant}"));
        };
        *out = Box::into_raw(Box::new(TrussEngine::new(variant)));
        TrussStatus::Ok
    })
}

/// Loads a whitespace-separated `SRC DST [TIMESTAMP]` edge list and decomposes
/// the whole graph. Self-loops and repeated edges in the file are dropped.
///
/// # Safety
/// `path` must be null or a NUL-terminated string; `out` must be null or
/// point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn truss_engine_load(
    path: *const c_char,
    variant: u32,
    out: *mut *mut TrussEngine,
) -> TrussStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return fail(TrussStatus::NullPointer, "path or out is null");
        }
        let Some(variant) = variant_of(variant) else {
            return fail(TrussStatus::InvalidArgument, format!("unknown variant {variant}"));
        };
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            return fail(TrussStatus::InvalidArgument, "path is not UTF-8");
        };
        let ds = match load_temporal_file(Path::new(path)) {
            Ok(ds) => ds,
            Err(e) => return from_error(e),
        };
        let graph = build_prefix(&ds, Fraction::whole()).graph;
        let labels = ds.labels().to_vec();
        let ids = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, VertexId(i as u32)))
            .collect();
        *out = Box::into_raw(Box::new(TrussEngine {
            inner: DynamicTruss::from_graph(graph, variant),
            labels,
            ids,
        }));
        TrussStatus::Ok
    })
}

/// Releases an engine. Null is ignored.
///
/// # Safety
/// `engine` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn truss_engine_free(engine: *mut TrussEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Runs the levels of each insertion concurrently when `enabled`.
///
/// # Safety
/// `engine` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn truss_engine_set_parallel_levels(
    engine: *mut TrussEngine,
    enabled: bool,
) -> TrussStatus {
    guard(|| {
        let engine = engine_mut!(engine);
        engine.inner.set_order(if enabled {
            LevelOrder::Parallel
        } else {
            LevelOrder::Ascending
        });
        TrussStatus::Ok
    })
}

/// Inserts `{u, v}` and updates truss numbers. On success the new edge's
/// truss number is written to `out_k` when it is not null.
///
/// # Safety
/// `engine` must be null or a live handle; `out_k` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn truss_insert_edge(
    engine: *mut TrussEngine,
    u: u64,
    v: u64,
    out_k: *mut u32,
) -> TrussStatus {
    guard(|| {
        let engine = engine_mut!(engine);
        if u == v {
            return fail(TrussStatus::SelfLoop, format!("self-loop on {u}"));
        }
        let (a, b) = (engine.intern(u), engine.intern(v));
        match engine.inner.insert_edge(a, b) {
            Ok(r) => {
                if !out_k.is_null() {
                    *out_k = r.new_k;
                }
                TrussStatus::Ok
            }
            Err(Rejection::Duplicate(_)) => {
                fail(TrussStatus::Duplicate, format!("edge ({u}, {v}) already present"))
            }
            Err(Rejection::SelfLoop) => fail(TrussStatus::SelfLoop, format!("self-loop on {u}")),
        }
    })
}

/// Inserts `count` edges given as `2 * count` labels `u0 v0 u1 v1 ...`.
/// Self-loops, edges already present and repeats within the batch are
/// skipped; the number actually added goes to `out_accepted` when not null.
///
/// # Safety
/// `engine` must be null or a live handle; `pairs` must be null or point to
/// `2 * count` readable values; `out_accepted` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn truss_insert_batch(
    engine: *mut TrussEngine,
    pairs: *const u64,
    count: usize,
    out_accepted: *mut usize,
) -> TrussStatus {
    guard(|| {
        let engine = engine_mut!(engine);
        if count == 0 {
            if !out_accepted.is_null() {
                *out_accepted = 0;
            }
            return TrussStatus::Ok;
        }
        if pairs.is_null() {
            return fail(TrussStatus::NullPointer, "pairs is null");
        }
        let Some(len) = count.checked_mul(2) else {
            return fail(TrussStatus::InvalidArgument, "count overflows");
        };
        let flat = std::slice::from_raw_parts(pairs, len);
        let batch: Vec<(VertexId, VertexId)> = flat
            .chunks_exact(2)
            .map(|p| (engine.intern(p[0]), engine.intern(p[1])))
            .collect();
        let result = engine.inner.insert_batch(&batch);
        if !out_accepted.is_null() {
            *out_accepted = result.accepted.len();
        }
        TrussStatus::Ok
    })
}

/// Truss number of the edge `{u, v}`.
///
/// # Safety
/// `engine` must be null or a live handle; `out_k` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn truss_truss_number(
    engine: *const TrussEngine,
    u: u64,
    v: u64,
    out_k: *mut u32,
) -> TrussStatus {
    guard(|| {
        let engine = engine_ref!(engine);
        if out_k.is_null() {
            return fail(TrussStatus::NullPointer, "out_k is null");
        }
        let k = match (engine.ids.get(&u), engine.ids.get(&v)) {
            (Some(&a), Some(&b)) => engine.inner.truss_number(a, b),
            _ => None,
        };
        match k {
            Some(k) => {
                *out_k = k;
                TrussStatus::Ok
            }
            None => fail(TrussStatus::UnknownEdge, format!("edge ({u}, {v}) is not in the graph")),
        }
    })
}

/// Largest truss number, 0 for an empty graph or a null handle.
///
/// # Safety
/// `engine` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn truss_ktmax(engine: *const TrussEngine) -> u32 {
    engine.as_ref().map_or(0, |e| e.inner.ktmax())
}

/// # Safety
/// `engine` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn truss_edge_count(engine: *const TrussEngine) -> usize {
    engine.as_ref().map_or(0, |e| e.inner.graph().edge_count())
}

/// Distinct labels seen so far, including endpoints of rejected edges.
///
/// # Safety
/// `engine` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn truss_vertex_count(engine: *const TrussEngine) -> usize {
    engine.as_ref().map_or(0, |e| e.labels.len())
}

/// Recomputes from scratch and compares.
///
/// # Safety
/// `engine` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn truss_verify(engine: *const TrussEngine) -> TrussStatus {
    guard(|| {
        let engine = engine_ref!(engine);
        match engine.inner.verify() {
            truss_core::Verdict::Valid => TrussStatus::Ok,
            truss_core::Verdict::Violations(v) => fail(
                TrussStatus::VerificationFailed,
                format!("{} edges disagree with a full recompute", v.len()),
            ),
        }
    })
}

/// Copies every edge with its truss number into `buf`, in insertion order.
/// `out_len` always receives the edge count; if it exceeds `capacity`
/// nothing is copied and `TRUSS_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `engine` must be null or a live handle; `buf` must be null or point to
/// `capacity` writable [`TrussEdge`]s; `out_len` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn truss_export_edges(
    engine: *const TrussEngine,
    buf: *mut TrussEdge,
    capacity: usize,
    out_len: *mut usize,
) -> TrussStatus {
    guard(|| {
        let engine = engine_ref!(engine);
        if out_len.is_null() {
            return fail(TrussStatus::NullPointer, "out_len is null");
        }
        let g = engine.inner.graph();
        let m = g.edge_count();
        *out_len = m;
        if m > capacity {
            return fail(
                TrussStatus::BufferTooSmall,
                format!("{m} edges do not fit in {capacity}"),
            );
        }
        if m == 0 {
            return TrussStatus::Ok;
        }
        if buf.is_null() {
            return fail(TrussStatus::NullPointer, "buf is null");
        }
        let out = std::slice::from_raw_parts_mut(buf, m);
        let st = engine.inner.state();
        for (slot, id) in out.iter_mut().zip(g.edge_ids()) {
            let e = g.edge(id);
            *slot = TrussEdge {
                u: engine.labels[e.u().index()],
                v: engine.labels[e.v().index()],
                k: st.get(id),
            };
        }
        TrussStatus::Ok
    })
}
