//! C interface to the relmap engine.
//!
//! Every function returns a [`RelmapStatus`]; results come back through out
//! pointers. On failure, [`relmap_last_error_message`] describes the most
//! recent error on the calling thread. Engines are opaque handles created by
//! [`relmap_engine_new`] and released with [`relmap_engine_free`]. Strings
//! returned by the library are released with [`relmap_string_free`].
//!
//! A handle must not be used from two threads at once.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use relmap::codes::{AlloVector, DispBin, EgoVector};
use relmap::engine::{Engine, Observation, Prediction, Resolution};
use relmap::error::{EngineError, GraphError, HarnessError};
use relmap::graph::{export_dot, export_json, Descriptor, NodeId};
use relmap::Config;

/// Outcome of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelmapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    OutOfRange = 4,
    NoActivePart = 5,
    UnknownNode = 6,
    NoGridLocation = 7,
    NoCandidate = 8,
    NoRelation = 9,
    PatternSpaceExhausted = 10,
    Schema = 11,
    Runtime = 12,
    Panic = 13,
}

/// Opaque engine handle.
pub struct RelmapEngine {
    engine: Engine,
}

/// Object-vector cell.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RelmapOvcCell {
    pub dir_bin: u32,
    pub ring: u32,
}

/// Displacement bin; `dir_bin` and `ring` are meaningless when `is_zero`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RelmapDispBin {
    pub is_zero: bool,
    pub dir_bin: u32,
    pub ring: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RelmapObserveResult {
    pub node: u32,
    pub ovc: RelmapOvcCell,
    pub node_allocated: bool,
    pub edge_learned: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RelmapMoveResult {
    pub candidate_count: usize,
    pub range_exceeded: bool,
}

/// How a prediction chose among grid-consistent cells.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelmapResolution {
    Edge = 0,
    Continuity = 1,
    Fallback = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelmapPrediction {
    pub node: u32,
    pub ovc: RelmapOvcCell,
    pub vector_x: f64,
    pub vector_y: f64,
    pub candidates_considered: usize,
    pub resolved_by: RelmapResolution,
}

/// The represented part, if any.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RelmapActive {
    pub has_active: bool,
    pub node: u32,
    pub ovc: RelmapOvcCell,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

struct Failure(RelmapStatus, String);

impl Failure {
    fn new(status: RelmapStatus, msg: impl Into<String>) -> Self {
        Self(status, msg.into())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let status = match &e {
            EngineError::Graph(g) => return g.clone().into(),
            EngineError::Code(_) => RelmapStatus::OutOfRange,
            EngineError::Config(_) => RelmapStatus::InvalidConfig,
            EngineError::NoActivePart => RelmapStatus::NoActivePart,
            EngineError::NoGridLocation(_) => RelmapStatus::NoGridLocation,
            EngineError::NoCandidateInRange(_) => RelmapStatus::NoCandidate,
            EngineError::NoRelation(..) => RelmapStatus::NoRelation,
        };
        Self(status, e.to_string())
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        let status = match e {
            GraphError::UnknownNode(_) => RelmapStatus::UnknownNode,
            GraphError::PatternSpaceExhausted(_) => RelmapStatus::PatternSpaceExhausted,
            GraphError::SelfEdge(_) | GraphError::Import(_) => RelmapStatus::InvalidArgument,
        };
        Self(status, e.to_string())
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let status = match e.exit_code() {
            2 => RelmapStatus::Schema,
            _ => RelmapStatus::Runtime,
        };
        Self(status, e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RelmapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RelmapStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RelmapStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::new(RelmapStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or valid for writes of `T`.
unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

/// # Safety
/// `e` must be null or a live handle from [`relmap_engine_new`].
unsafe fn engine_mut<'a>(e: *mut RelmapEngine) -> Result<&'a mut Engine, Failure> {
    e.as_mut()
        .map(|h| &mut h.engine)
        .ok_or_else(|| null("engine"))
}

/// # Safety
/// `e` must be null or a live handle from [`relmap_engine_new`].
unsafe fn engine_ref<'a>(e: *const RelmapEngine) -> Result<&'a Engine, Failure> {
    e.as_ref().map(|h| &h.engine).ok_or_else(|| null("engine"))
}

/// # Safety
/// `s` must be null or a nul-terminated string.
unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        Failure::new(
            RelmapStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("nul bytes removed")
        .into_raw()
}

fn ovc(c: relmap::codes::OvcCell) -> RelmapOvcCell {
    RelmapOvcCell {
        dir_bin: c.dir_bin,
        ring: c.ring,
    }
}

fn prediction(p: &Prediction) -> RelmapPrediction {
    RelmapPrediction {
        node: p.node.0,
        ovc: ovc(p.ovc),
        vector_x: p.vector.dx,
        vector_y: p.vector.dy,
        candidates_considered: p.candidates_considered,
        resolved_by: match p.resolved_by {
            Resolution::Edge => RelmapResolution::Edge,
            Resolution::Continuity => RelmapResolution::Continuity,
            Resolution::Fallback => RelmapResolution::Fallback,
        },
    }
}

/// Message for the last failed call on this thread; empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn relmap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn relmap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn relmap_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates an engine. `config_json` may be null for the defaults; otherwise
/// it is a JSON config object (missing fields take defaults).
///
/// # Safety
/// `config_json` must be null or nul-terminated; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_new(
    config_json: *const c_char,
    seed: u64,
    out: *mut *mut RelmapEngine,
) -> RelmapStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = if config_json.is_null() {
            Config::default()
        } else {
            serde_json::from_str(text(config_json, "config_json")?)
                .map_err(|e| Failure::new(RelmapStatus::InvalidConfig, format!("config: {e}")))?
        };
        let engine = Engine::new(config, seed)?;
        out.write(Box::into_raw(Box::new(RelmapEngine { engine })));
        Ok(())
    })
}

/// Destroys an engine. Null is ignored.
///
/// # Safety
/// `e` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_free(e: *mut RelmapEngine) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Sets the head-direction estimate, radians counterclockwise from +x.
///
/// # Safety
/// `e` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_set_heading(
    e: *mut RelmapEngine,
    angle: f64,
) -> RelmapStatus {
    guard(|| {
        if !angle.is_finite() {
            return Err(Failure::new(
                RelmapStatus::InvalidArgument,
                "angle is not finite",
            ));
        }
        engine_mut(e)?.set_heading(angle);
        Ok(())
    })
}

/// Senses a part at egocentric `(forward, left)` whose descriptor has the
/// given active bits.
///
/// # Safety
/// `e` must be a live handle; `bits` valid for `n_bits` reads; `out` valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_observe(
    e: *mut RelmapEngine,
    forward: f64,
    left: f64,
    bits: *const u16,
    n_bits: usize,
    environment: u32,
    out: *mut RelmapObserveResult,
) -> RelmapStatus {
    guard(|| {
        let engine = engine_mut(e)?;
        if bits.is_null() {
            return Err(null("bits"));
        }
        let dim = engine.config().descriptor.dim;
        let bits = std::slice::from_raw_parts(bits, n_bits).to_vec();
        let descriptor = Descriptor::from_bits(bits, dim).ok_or_else(|| {
            Failure::new(
                RelmapStatus::InvalidArgument,
                format!("descriptor bits must lie in [0, {dim})"),
            )
        })?;
        let obs = Observation {
            ego: EgoVector::new(forward, left),
            descriptor,
            environment,
        };
        let r = engine.observe_part(&obs)?;
        write(
            out,
            RelmapObserveResult {
                node: r.node.0,
                ovc: ovc(r.ovc),
                node_allocated: r.node_allocated,
                edge_learned: r.edge_learned,
            },
            "out",
        )
    })
}

/// Self-motion by egocentric `(forward, left)`, then a counterclockwise turn.
///
/// # Safety
/// `e` must be a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_path_integrate(
    e: *mut RelmapEngine,
    forward: f64,
    left: f64,
    turn: f64,
    out: *mut RelmapMoveResult,
) -> RelmapStatus {
    guard(|| {
        if !(forward.is_finite() && left.is_finite() && turn.is_finite()) {
            return Err(Failure::new(
                RelmapStatus::InvalidArgument,
                "move is not finite",
            ));
        }
        let r = engine_mut(e)?.path_integrate(EgoVector::new(forward, left), turn);
        if !out.is_null() {
            out.write(RelmapMoveResult {
                candidate_count: r.candidate_count,
                range_exceeded: r.range_exceeded,
            });
        }
        Ok(())
    })
}

/// Predicts the cell that attending `node` would activate. No state change.
///
/// # Safety
/// `e` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_predict(
    e: *const RelmapEngine,
    node: u32,
    out: *mut RelmapPrediction,
) -> RelmapStatus {
    guard(|| {
        let p = engine_ref(e)?.predict_observation(NodeId(node))?;
        write(out, prediction(&p), "out")
    })
}

/// Moves attention to `node`, activating the predicted cell.
///
/// # Safety
/// `e` must be a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_shift_attention(
    e: *mut RelmapEngine,
    node: u32,
    out: *mut RelmapPrediction,
) -> RelmapStatus {
    guard(|| {
        let p = engine_mut(e)?.shift_attention(NodeId(node))?;
        if !out.is_null() {
            out.write(prediction(&p));
        }
        Ok(())
    })
}

/// # Safety
/// `e` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_active(
    e: *const RelmapEngine,
    out: *mut RelmapActive,
) -> RelmapStatus {
    guard(|| {
        let active = engine_ref(e)?
            .active()
            .map_or(RelmapActive::default(), |a| RelmapActive {
                has_active: true,
                node: a.node.0,
                ovc: ovc(a.ovc),
            });
        write(out, active, "out")
    })
}

/// Offline consolidation; writes the number of pairs that gained an edge.
///
/// # Safety
/// `e` must be a live handle; `added` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_consolidate(
    e: *mut RelmapEngine,
    hop_limit: usize,
    added: *mut usize,
) -> RelmapStatus {
    guard(|| {
        let n = engine_mut(e)?.consolidate(hop_limit);
        if !added.is_null() {
            added.write(n);
        }
        Ok(())
    })
}

/// # Safety
/// `e` must be a live handle; outputs null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_graph_size(
    e: *const RelmapEngine,
    nodes: *mut usize,
    edges: *mut usize,
) -> RelmapStatus {
    guard(|| {
        let g = engine_ref(e)?.graph();
        if !nodes.is_null() {
            nodes.write(g.node_count());
        }
        if !edges.is_null() {
            edges.write(g.edge_count());
        }
        Ok(())
    })
}

/// Position of part `to` relative to part `from`, decoded from the graph's
/// coarse edges and the stored grid cells.
///
/// # Safety
/// `e` must be a live handle; `x` and `y` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_decode_part(
    e: *const RelmapEngine,
    from: u32,
    to: u32,
    x: *mut f64,
    y: *mut f64,
) -> RelmapStatus {
    guard(|| {
        if x.is_null() || y.is_null() {
            return Err(null("out"));
        }
        let v = engine_ref(e)?.decode_part(NodeId(from), NodeId(to))?;
        x.write(v.dx);
        y.write(v.dy);
        Ok(())
    })
}

/// The graph as JSON when `json` is true, Graphviz DOT otherwise.
/// Free the result with [`relmap_string_free`].
///
/// # Safety
/// `e` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_export(
    e: *const RelmapEngine,
    json: bool,
    out: *mut *mut c_char,
) -> RelmapStatus {
    guard(|| {
        let g = engine_ref(e)?.graph();
        let s = if json { export_json(g) } else { export_dot(g) };
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(owned_string(s));
        Ok(())
    })
}

/// Object-vector cell of an allocentric vector under the engine's code.
///
/// # Safety
/// `e` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_encode_ovc(
    e: *const RelmapEngine,
    dx: f64,
    dy: f64,
    out: *mut RelmapOvcCell,
) -> RelmapStatus {
    guard(|| {
        let cell = engine_ref(e)?
            .codes()
            .ovc
            .encode(AlloVector::new(dx, dy))
            .map_err(|err| Failure::new(RelmapStatus::OutOfRange, err.to_string()))?;
        write(out, ovc(cell), "out")
    })
}

/// Displacement bin of an allocentric vector under the engine's code.
///
/// # Safety
/// `e` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relmap_engine_encode_disp(
    e: *const RelmapEngine,
    dx: f64,
    dy: f64,
    out: *mut RelmapDispBin,
) -> RelmapStatus {
    guard(|| {
        let bin = match engine_ref(e)?
            .codes()
            .disp
            .encode_vector(AlloVector::new(dx, dy))
        {
            DispBin::Zero => RelmapDispBin {
                is_zero: true,
                ..RelmapDispBin::default()
            },
            DispBin::Bin { dir_bin, ring } => RelmapDispBin {
                is_zero: false,
                dir_bin,
                ring,
            },
        };
        write(out, bin, "out")
    })
}

/// Runs a scenario file and writes its artifacts into `out_dir`.
/// `exit_code` receives 0 when every assertion held, 1 otherwise. Schema
/// and runtime failures are reported through the status.
///
/// # Safety
/// `path` and `out_dir` must be nul-terminated; `exit_code` null or valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn relmap_run_scenario(
    path: *const c_char,
    out_dir: *const c_char,
    exit_code: *mut i32,
) -> RelmapStatus {
    guard(|| {
        let path = text(path, "path")?;
        let out_dir = text(out_dir, "out_dir")?;
        let output = relmap::harness::run_file(Path::new(path), Path::new(out_dir), None)?;
        if !exit_code.is_null() {
            exit_code.write(output.exit_code());
        }
        Ok(())
    })
}
