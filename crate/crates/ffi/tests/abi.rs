//! Exercises the C interface through raw pointers, as a C caller would.

use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use relmap_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(relmap_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn bits(id: u16) -> Vec<u16> {
    (0..16).map(|b| id * 16 + b).collect()
}

struct Handle(*mut RelmapEngine);

impl Handle {
    fn new(config: Option<&str>) -> Self {
        let json = config.map(|c| CString::new(c).unwrap());
        let mut e = ptr::null_mut();
        let status = unsafe {
            relmap_engine_new(json.as_ref().map_or(ptr::null(), |c| c.as_ptr()), 9, &mut e)
        };
        assert_eq!(status, RelmapStatus::Ok, "{}", last_error());
        assert!(!e.is_null());
        Self(e)
    }

    fn observe(&self, forward: f64, left: f64, id: u16) -> (RelmapStatus, RelmapObserveResult) {
        let b = bits(id);
        let mut out = RelmapObserveResult::default();
        let s = unsafe {
            relmap_engine_observe(self.0, forward, left, b.as_ptr(), b.len(), 0, &mut out)
        };
        (s, out)
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { relmap_engine_free(self.0) };
    }
}

#[test]
fn observe_predict_and_shift() {
    let h = Handle::new(None);
    let (s, a) = h.observe(3.0, 1.0, 0);
    assert_eq!(s, RelmapStatus::Ok);
    assert!(a.node_allocated && !a.edge_learned);
    let (s, b) = h.observe(-2.0, 4.5, 1);
    assert_eq!(s, RelmapStatus::Ok);
    assert!(b.edge_learned && b.node != a.node);

    let mut pred = RelmapPrediction {
        node: 0,
        ovc: RelmapOvcCell::default(),
        vector_x: 0.0,
        vector_y: 0.0,
        candidates_considered: 0,
        resolved_by: RelmapResolution::Fallback,
    };
    assert_eq!(
        unsafe { relmap_engine_predict(h.0, a.node, &mut pred) },
        RelmapStatus::Ok
    );
    assert_eq!(pred.ovc, a.ovc);
    assert_eq!(pred.resolved_by, RelmapResolution::Edge);
    assert!(pred.candidates_considered > 1);
    assert!((pred.vector_x - 3.0).abs() < 1e-9 && (pred.vector_y - 1.0).abs() < 1e-9);

    assert_eq!(
        unsafe { relmap_engine_shift_attention(h.0, a.node, ptr::null_mut()) },
        RelmapStatus::Ok
    );
    let mut active = RelmapActive::default();
    assert_eq!(
        unsafe { relmap_engine_active(h.0, &mut active) },
        RelmapStatus::Ok
    );
    assert!(active.has_active);
    assert_eq!((active.node, active.ovc), (a.node, a.ovc));

    let (mut x, mut y) = (0.0, 0.0);
    assert_eq!(
        unsafe { relmap_engine_decode_part(h.0, a.node, b.node, &mut x, &mut y) },
        RelmapStatus::Ok
    );
    assert!(((x + 5.0).powi(2) + (y - 3.5).powi(2)).sqrt() < 0.09);
}

#[test]
fn movement_and_consolidation() {
    let h = Handle::new(None);
    h.observe(2.0, 0.0, 0);
    h.observe(0.0, 2.0, 1);
    h.observe(-2.0, 0.5, 2);
    let mut mv = RelmapMoveResult::default();
    assert_eq!(
        unsafe { relmap_engine_path_integrate(h.0, 0.3, 0.0, 0.2, &mut mv) },
        RelmapStatus::Ok
    );
    assert!(mv.candidate_count >= 1 && !mv.range_exceeded);
    let mut added = 0;
    assert_eq!(
        unsafe { relmap_engine_consolidate(h.0, 2, &mut added) },
        RelmapStatus::Ok
    );
    assert!(added > 0);
    let (mut nodes, mut edges) = (0, 0);
    assert_eq!(
        unsafe { relmap_engine_graph_size(h.0, &mut nodes, &mut edges) },
        RelmapStatus::Ok
    );
    assert_eq!((nodes, edges), (3, 6));
}

#[test]
fn export_round_trips_through_owned_strings() {
    let h = Handle::new(None);
    h.observe(2.0, 1.0, 0);
    h.observe(1.0, -2.0, 1);
    for (json, prefix) in [(true, "{"), (false, "digraph")] {
        let mut s = ptr::null_mut();
        assert_eq!(
            unsafe { relmap_engine_export(h.0, json, &mut s) },
            RelmapStatus::Ok
        );
        let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
        assert!(text.starts_with(prefix), "{text}");
        unsafe { relmap_string_free(s) };
    }
    unsafe { relmap_string_free(ptr::null_mut()) };
}

#[test]
fn codebook_queries() {
    let h = Handle::new(None);
    let mut cell = RelmapOvcCell::default();
    assert_eq!(
        unsafe { relmap_engine_encode_ovc(h.0, 0.1, 0.0, &mut cell) },
        RelmapStatus::Ok
    );
    assert_eq!(
        cell,
        RelmapOvcCell {
            dir_bin: 0,
            ring: 0
        }
    );
    assert_eq!(
        unsafe { relmap_engine_encode_ovc(h.0, 50.0, 0.0, &mut cell) },
        RelmapStatus::OutOfRange
    );
    assert!(last_error().contains("range"));
    let mut bin = RelmapDispBin::default();
    assert_eq!(
        unsafe { relmap_engine_encode_disp(h.0, 0.01, 0.0, &mut bin) },
        RelmapStatus::Ok
    );
    assert!(bin.is_zero);
    assert_eq!(
        unsafe { relmap_engine_encode_disp(h.0, 0.0, 1.0, &mut bin) },
        RelmapStatus::Ok
    );
    assert!(!bin.is_zero && bin.dir_bin == 4);
}

#[test]
fn errors_come_back_as_status_codes() {
    let h = Handle::new(None);
    let mut pred = std::mem::MaybeUninit::<RelmapPrediction>::uninit();
    assert_eq!(
        unsafe { relmap_engine_predict(h.0, 0, pred.as_mut_ptr()) },
        RelmapStatus::UnknownNode
    );
    let (_, a) = h.observe(1.0, 1.0, 0);
    assert_eq!(
        unsafe { relmap_engine_predict(h.0, 7, pred.as_mut_ptr()) },
        RelmapStatus::UnknownNode
    );
    assert!(last_error().contains("unknown node n7"));
    assert_eq!(
        unsafe { relmap_engine_predict(ptr::null(), a.node, pred.as_mut_ptr()) },
        RelmapStatus::NullPointer
    );
    assert_eq!(
        unsafe { relmap_engine_predict(h.0, a.node, ptr::null_mut()) },
        RelmapStatus::NullPointer
    );
    assert_eq!(h.observe(30.0, 0.0, 1).0, RelmapStatus::OutOfRange);
    let (s, _) = {
        let b = [9999u16];
        let mut out = RelmapObserveResult::default();
        (
            unsafe { relmap_engine_observe(h.0, 1.0, 0.0, b.as_ptr(), 1, 0, &mut out) },
            out,
        )
    };
    assert_eq!(s, RelmapStatus::InvalidArgument);
    assert_eq!(
        unsafe { relmap_engine_set_heading(h.0, f64::NAN) },
        RelmapStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { relmap_engine_path_integrate(h.0, f64::INFINITY, 0.0, 0.0, ptr::null_mut()) },
        RelmapStatus::InvalidArgument
    );
    let (mut x, mut y) = (0.0, 0.0);
    let lone = h.observe(0.0, -1.0, 2).1;
    unsafe { relmap_engine_free(ptr::null_mut()) };
    // a and lone are joined by the edge just learned; an unknown node is not
    assert_eq!(
        unsafe { relmap_engine_decode_part(h.0, a.node, lone.node, &mut x, &mut y) },
        RelmapStatus::Ok
    );
    assert_eq!(
        unsafe { relmap_engine_decode_part(h.0, a.node, 42, &mut x, &mut y) },
        RelmapStatus::UnknownNode
    );
}

#[test]
fn bad_configs_are_rejected() {
    for (json, status) in [
        (
            "{\"grid\": {\"period\": -1.0}}",
            RelmapStatus::InvalidConfig,
        ),
        ("{\"nonsense\": 1}", RelmapStatus::InvalidConfig),
        ("not json", RelmapStatus::InvalidConfig),
    ] {
        let c = CString::new(json).unwrap();
        let mut e = ptr::null_mut();
        assert_eq!(
            unsafe { relmap_engine_new(c.as_ptr(), 0, &mut e) },
            status,
            "{json}"
        );
        assert!(e.is_null());
    }
    assert_eq!(
        unsafe { relmap_engine_new(ptr::null(), 0, ptr::null_mut()) },
        RelmapStatus::NullPointer
    );
    let h = Handle::new(Some("{\"strategy\": null}"));
    h.observe(1.0, 2.0, 0);
}

#[test]
fn scenarios_run_through_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/three_parts.json");
    let path = CString::new(scenario.to_str().unwrap()).unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut code = -1;
    assert_eq!(
        unsafe { relmap_run_scenario(path.as_ptr(), out.as_ptr(), &mut code) },
        RelmapStatus::Ok
    );
    assert_eq!(code, 0);
    assert!(dir.path().join("metrics.csv").is_file());
    let missing = CString::new("/nonexistent/scenario.json").unwrap();
    assert_eq!(
        unsafe { relmap_run_scenario(missing.as_ptr(), out.as_ptr(), &mut code) },
        RelmapStatus::Schema
    );
}

#[test]
fn header_declares_every_entry_point() {
    let header =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/relmap.h"))
            .unwrap();
    for f in [
        "relmap_engine_new",
        "relmap_engine_free",
        "relmap_engine_observe",
        "relmap_engine_path_integrate",
        "relmap_engine_predict",
        "relmap_engine_shift_attention",
        "relmap_engine_consolidate",
        "relmap_engine_export",
        "relmap_engine_decode_part",
        "relmap_engine_encode_ovc",
        "relmap_engine_encode_disp",
        "relmap_run_scenario",
        "relmap_last_error_message",
        "relmap_string_free",
        "relmap_version",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f}");
    }
    assert!(header.contains("typedef struct RelmapEngine RelmapEngine;"));
    let v = unsafe { CStr::from_ptr(relmap_version()) }
        .to_str()
        .unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
