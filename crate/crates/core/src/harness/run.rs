//! Drives one scenario through the world and the engine.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::codes::{AlloVector, EgoVector};
use crate::engine::{Engine, MoveOutcome};
use crate::error::{EngineError, HarnessError};
use crate::graph::{export_dot, export_json, NodeId};
use crate::world::{Action, World};

use super::metrics::{
    check_assertions, metrics_csv, AssertionResult, PredictionKind, RunCounters, StepRow, Summary,
    SCHEMA_VERSION,
};
use super::scenario::Scenario;

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub seed: u64,
    pub rows: Vec<StepRow>,
    pub summary: Summary,
    pub assertions: Vec<AssertionResult>,
    pub graph_json: String,
    pub graph_dot: String,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    /// 0 when every assertion holds, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn metrics_csv(&self) -> String {
        metrics_csv(&self.rows)
    }

    /// summary.json text. The timestamp is the only nondeterministic field
    /// and lives under `metadata`.
    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Metadata {
            tool: &'static str,
            version: &'static str,
            created: String,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            schema_version: u32,
            metadata: Metadata,
            seed: u64,
            summary: &'a Summary,
            assertions: &'a [AssertionResult],
        }
        let doc = Doc {
            schema_version: SCHEMA_VERSION,
            metadata: Metadata {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            },
            seed: self.seed,
            summary: &self.summary,
            assertions: &self.assertions,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("summary serializes");
        text.push('\n');
        text
    }

    /// Writes metrics.csv, summary.json, graph.json and graph.dot into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), HarnessError> {
        fs::create_dir_all(dir)?;
        write_atomic(&dir.join("metrics.csv"), &self.metrics_csv())?;
        write_atomic(&dir.join("summary.json"), &self.summary_json())?;
        write_atomic(&dir.join("graph.json"), &self.graph_json)?;
        write_atomic(&dir.join("graph.dot"), &self.graph_dot)?;
        Ok(())
    }
}

/// Writes to a sibling temp file, then renames over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), HarnessError> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn runtime(step: usize, action: &Action, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Runtime(format!("step {step} ({}): {e}", action.label()))
}

struct Runner {
    world: World,
    engine: Engine,
    /// Shortest vector taking the engine's random initial phase to the true
    /// phase of the start position.
    registration: AlloVector,
    part_of: BTreeMap<NodeId, u32>,
    counters: RunCounters,
}

impl Runner {
    fn new(scenario: &Scenario) -> Result<Self, HarnessError> {
        let world = scenario
            .build_world()
            .map_err(|e| HarnessError::Runtime(format!("world: {e}")))?;
        let mut engine = Engine::new(scenario.config.clone(), scenario.seed)
            .map_err(|e| HarnessError::Schema(e.to_string()))?;
        engine.set_heading(world.heading());
        let grid = &engine.codes().grid;
        let registration = grid.diff(engine.agent_phase(), grid.world_to_phase(world.agent()));
        Ok(Self {
            world,
            engine,
            registration,
            part_of: BTreeMap::new(),
            counters: RunCounters::default(),
        })
    }

    /// Engine phase expressed in world terms, compared with the truth.
    fn phase_error(&self) -> f64 {
        let grid = &self.engine.codes().grid;
        let truth = grid.world_to_phase(self.world.agent());
        let registered = grid.advance(self.engine.agent_phase(), self.registration);
        registered.torus_distance(&truth)
    }

    fn ovc_error(&self) -> Option<f64> {
        let active = self.engine.active()?;
        let part = *self.part_of.get(&active.node)?;
        let truth = self.world.true_allo_vector(part).ok()?;
        Some(self.engine.codes().ovc.decode(active.ovc).distance(&truth))
    }

    fn step(&mut self, step: usize, action: Action) -> Result<StepRow, HarnessError> {
        let mut row = StepRow {
            step,
            action: action.label(),
            prediction_correct: None,
            candidate_count: 0,
            ambiguity_resolved_by: None,
            node_count: 0,
            edge_count: 0,
            ovc_error_m: None,
            phase_error: 0.0,
            kind: None,
        };
        match action {
            Action::Move(..) | Action::Turn(_) => {
                let tracked = self.engine.active().map(|a| a.node);
                let outcome = self
                    .world
                    .apply_action(action)
                    .map_err(|e| runtime(step, &action, e))?;
                let (ego, turn) = match action {
                    Action::Turn(t) => (EgoVector::ZERO, t),
                    _ => (outcome.executed, 0.0),
                };
                let MoveOutcome {
                    candidate_count,
                    range_exceeded,
                } = self.engine.path_integrate(ego, turn);
                row.candidate_count = candidate_count;
                if range_exceeded {
                    self.counters.range_exits += 1;
                }
                if matches!(action, Action::Move(..)) {
                    if let Some(node) = tracked {
                        let truth = self
                            .part_of
                            .get(&node)
                            .and_then(|&p| self.world.true_allo_vector(p).ok())
                            .map(|v| self.engine.codes().ovc.encode(v));
                        let correct = match (self.engine.active(), truth) {
                            (Some(a), Some(Ok(cell))) => a.ovc == cell,
                            (None, Some(Err(_))) => true,
                            _ => false,
                        };
                        row.prediction_correct = Some(correct);
                        row.kind = Some(PredictionKind::Path);
                        row.ambiguity_resolved_by = Some("CONTINUITY");
                    }
                }
            }
            Action::Attend(part) => {
                let obs = self
                    .world
                    .sense(part, self.engine.config().noise)
                    .map_err(|e| runtime(step, &action, e))?;
                if self.engine.active().is_some() {
                    if let Some(node) = self.engine.recognize(&obs) {
                        let truth = self
                            .world
                            .true_allo_vector(part)
                            .ok()
                            .and_then(|v| self.engine.codes().ovc.encode(v).ok());
                        row.kind = Some(PredictionKind::Attention);
                        match self.engine.predict_observation(node) {
                            Ok(pred) => {
                                row.prediction_correct = Some(Some(pred.ovc) == truth);
                                row.candidate_count = pred.candidates_considered;
                                row.ambiguity_resolved_by = Some(pred.resolved_by.as_str());
                            }
                            Err(EngineError::NoCandidateInRange(_)) => {
                                row.prediction_correct = Some(false);
                            }
                            Err(e) => return Err(runtime(step, &action, e)),
                        }
                    }
                }
                let outcome = self
                    .engine
                    .observe_part(&obs)
                    .map_err(|e| runtime(step, &action, e))?;
                self.part_of.insert(outcome.node, part);
            }
            Action::Consolidate(hops) => {
                self.world
                    .apply_action(action)
                    .map_err(|e| runtime(step, &action, e))?;
                self.engine.consolidate(hops);
            }
        }
        if self.engine.circuit_consistent() == Some(false) {
            self.counters.circuit_slack += 1;
        }
        let graph = self.engine.graph();
        row.node_count = graph.node_count();
        row.edge_count = graph.edge_count();
        row.ovc_error_m = self.ovc_error();
        row.phase_error = self.phase_error();
        Ok(row)
    }
}

/// Runs a validated scenario in memory.
pub fn execute(scenario: &Scenario) -> Result<RunOutput, HarnessError> {
    let mut runner = Runner::new(scenario)?;
    let actions = scenario.resolve_actions(&runner.world);
    let mut rows = Vec::with_capacity(actions.len());
    for (i, a) in actions.into_iter().enumerate() {
        rows.push(runner.step(i, a)?);
    }
    let graph = runner.engine.graph();
    let counters = RunCounters {
        relocations: graph.relocations(),
        consolidated_edges: graph.consolidated_edge_count(),
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        ..runner.counters
    };
    let summary = Summary::from_rows(&rows, counters);
    let assertions = check_assertions(&summary, &scenario.assertions);
    Ok(RunOutput {
        seed: scenario.seed,
        rows,
        summary,
        assertions,
        graph_json: export_json(graph),
        graph_dot: export_dot(graph),
    })
}

/// Loads, runs and writes one scenario file. `seed` overrides the file's seed.
pub fn run_file(path: &Path, out: &Path, seed: Option<u64>) -> Result<RunOutput, HarnessError> {
    let mut value = Scenario::read_value(path)?;
    if let Some(seed) = seed {
        if let Some(obj) = value.as_object_mut() {
            obj.insert("seed".into(), seed.into());
        }
    }
    let scenario = Scenario::from_value(value)?;
    let output = execute(&scenario)?;
    output.write(out)?;
    Ok(output)
}
