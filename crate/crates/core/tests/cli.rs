//! End-to-end checks of the `relmap` binary: exit codes, artifacts, sweeps
//! and export.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use relmap::harness::{Scenario, CSV_HEADER};
use serde_json::{json, Value};

fn relmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relmap"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn write(dir: &Path, name: &str, doc: Value) -> String {
    let path = dir.join(name);
    fs::write(&path, doc.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_all_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let r = relmap(&[
        "run",
        s(&scenarios().join("learn_revisit.json")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    for f in ["metrics.csv", "summary.json", "graph.json", "graph.dot"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let csv = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["summary"]["node_count"], 8);
    assert!(summary["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .all(|a| a["passed"] == true));
}

#[test]
fn seed_override_changes_the_world_but_not_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = scenarios().join("learn_revisit.json");
    let read = |dir: &str, seed: &str| {
        let out = tmp.path().join(dir);
        assert_eq!(
            code(&relmap(&[
                "run",
                s(&scenario),
                "--out",
                s(&out),
                "--seed",
                seed
            ])),
            0
        );
        fs::read(out.join("metrics.csv")).unwrap()
    };
    assert_eq!(read("a", "5"), read("b", "5"));
    assert_ne!(read("a", "5"), read("c", "6"));
}

#[test]
fn failed_assertion_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write(
        tmp.path(),
        "s.json",
        json!({
            "seed": 1,
            "actions": { "generator": "learn_revisit", "wander_steps": 5 },
            "assertions": [{ "metric": "node_count", "max": 3 }],
        }),
    );
    let r = relmap(&["run", &path, "--out", s(&tmp.path().join("o"))]);
    assert_eq!(code(&r), 1);
    assert!(String::from_utf8_lossy(&r.stderr).contains("node_count"));
    // artifacts are still written
    assert!(tmp.path().join("o/metrics.csv").is_file());
}

#[test]
fn schema_and_usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = [
        json!({ "seed": 1, "actions": [], "colour": "red" }),
        json!({ "seed": 1, "actions": [{ "jump": 1 }] }),
        json!({ "seed": 1, "actions": [], "assertions": [{ "metric": "no_such_metric", "min": 0 }] }),
        json!({ "seed": 1, "actions": [], "config": { "grid": { "period": -2.0 } } }),
    ];
    for (i, doc) in bad.into_iter().enumerate() {
        let path = write(tmp.path(), &format!("bad{i}.json"), doc);
        assert_eq!(
            code(&relmap(&["run", &path, "--out", s(tmp.path())])),
            2,
            "case {i}"
        );
    }
    fs::write(tmp.path().join("garbage.json"), "{ not json").unwrap();
    assert_eq!(
        code(&relmap(&["run", s(&tmp.path().join("garbage.json"))])),
        2
    );
    assert_eq!(
        code(&relmap(&["run", s(&tmp.path().join("missing.json"))])),
        2
    );
    assert_eq!(code(&relmap(&[])), 2);
    assert_eq!(code(&relmap(&["run"])), 2);
    assert_eq!(code(&relmap(&["export", "g.json", "--format", "svg"])), 2);
}

#[test]
fn runtime_errors_exit_three() {
    let tmp = tempfile::tempdir().unwrap();
    // part 1 is 9 m away, beyond sensor range
    let path = write(
        tmp.path(),
        "far.json",
        json!({
            "seed": 1,
            "world": {
                "bounds": [12.0, 12.0],
                "parts": [{ "id": 0, "position": [1.0, 1.0] }, { "id": 1, "position": [10.0, 1.0] }],
                "agent": { "position": [1.5, 1.0], "heading": 0.0 },
            },
            "actions": [{ "attend": 0 }, { "attend": 1 }],
        }),
    );
    let r = relmap(&["run", &path, "--out", s(&tmp.path().join("o"))]);
    assert_eq!(code(&r), 3);
    assert!(String::from_utf8_lossy(&r.stderr).contains("sensor range"));
}

#[test]
fn empty_scenario_gives_a_header_only_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    assert_eq!(
        code(&relmap(&[
            "run",
            s(&scenarios().join("empty.json")),
            "--out",
            s(&out)
        ])),
        0
    );
    assert_eq!(
        fs::read_to_string(out.join("metrics.csv")).unwrap(),
        format!("{CSV_HEADER}\n")
    );
}

fn sweep_rows(out: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(out.join("sweep.csv")).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn larger_grid_period_means_fewer_candidates() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let r = relmap(&[
        "sweep",
        s(&scenarios().join("ablation_no_relations.json")),
        "--grid",
        "config.grid.period=2,4",
        "--out",
        s(&out),
        "--jobs",
        "2",
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let header = csv::Reader::from_path(out.join("sweep.csv"))
        .unwrap()
        .headers()
        .unwrap()
        .clone();
    let col = header
        .iter()
        .position(|h| h == "mean_candidate_count")
        .unwrap();
    let rows = sweep_rows(&out);
    assert_eq!(rows.len(), 2);
    let mean: Vec<f64> = rows.iter().map(|r| r[col].parse().unwrap()).collect();
    assert!(mean[1] < mean[0], "{mean:?}");
    assert!(
        out.join("cell_000/metrics.csv").is_file() && out.join("cell_001/metrics.csv").is_file()
    );
}

#[test]
fn an_invalid_cell_does_not_stop_the_others() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let r = relmap(&[
        "sweep",
        s(&scenarios().join("learn_revisit.json")),
        "--grid",
        "config.grid.period=2,-1;seed=1,2",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&r), 2);
    let rows = sweep_rows(&out);
    assert_eq!(rows.len(), 4);
    let status: Vec<&str> = rows.iter().map(|r| &r[3]).collect();
    assert_eq!(status, ["ok", "ok", "schema_error", "schema_error"]);
    assert!(out.join("cell_001/summary.json").is_file());
    assert!(!out.join("cell_002").exists());
    assert_eq!(code(&relmap(&["sweep", "x.json", "--grid", "nonsense"])), 2);
}

#[test]
fn export_renders_dot() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    assert_eq!(
        code(&relmap(&[
            "run",
            s(&scenarios().join("three_parts.json")),
            "--out",
            s(&out)
        ])),
        0
    );
    let r = relmap(&["export", s(&out.join("graph.json")), "--format", "dot"]);
    assert_eq!(code(&r), 0);
    let dot = String::from_utf8(r.stdout).unwrap();
    assert_eq!(dot, fs::read_to_string(out.join("graph.dot")).unwrap());
    assert!(dot.starts_with("digraph"));
    fs::write(tmp.path().join("bad.json"), "{}").unwrap();
    assert_eq!(
        code(&relmap(&[
            "export",
            s(&tmp.path().join("bad.json")),
            "--format",
            "dot"
        ])),
        2
    );
}

#[test]
fn generated_scenarios_run_and_reproduce() {
    let tmp = tempfile::tempdir().unwrap();
    for traj in ["learn-revisit", "random-walk", "exploration"] {
        let path = tmp.path().join(format!("{traj}.json"));
        let r = relmap(&[
            "generate",
            "--seed",
            "4",
            "--trajectory",
            traj,
            "--steps",
            "30",
            "--out",
            s(&path),
        ]);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
        let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!(doc["actions"].is_array() && doc["world"]["parts"].is_array());
        assert_eq!(
            code(&relmap(&[
                "run",
                s(&path),
                "--out",
                s(&tmp.path().join(traj))
            ])),
            0
        );
    }
    // an inlined learn-revisit world behaves like the generated one
    let a = tmp.path().join("gen");
    let b = tmp.path().join("orig");
    let doc = json!({ "seed": 4, "actions": { "generator": "learn_revisit", "wander_steps": 30 } });
    let orig = write(tmp.path(), "orig.json", doc);
    assert_eq!(
        code(&relmap(&[
            "run",
            s(&tmp.path().join("learn-revisit.json")),
            "--out",
            s(&a)
        ])),
        0
    );
    assert_eq!(code(&relmap(&["run", &orig, "--out", s(&b)])), 0);
    assert_eq!(
        fs::read(a.join("metrics.csv")).unwrap(),
        fs::read(b.join("metrics.csv")).unwrap()
    );
}

#[test]
fn every_shipped_scenario_is_valid_and_passes() {
    let mut n = 0;
    for entry in fs::read_dir(scenarios()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            Scenario::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            let tmp = tempfile::tempdir().unwrap();
            assert_eq!(
                code(&relmap(&["run", s(&path), "--out", s(tmp.path())])),
                0,
                "{}",
                path.display()
            );
            n += 1;
        }
    }
    assert!(n >= 5);
}
