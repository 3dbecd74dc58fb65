//! The agent's belief: one represented part at a time (node plus active
//! object-vector cell), the grid phase and the heading. Observations build
//! the graph; movement and attention shifts update the object-vector cell
//! from the grid module, the stored part locations and the learned edges.

mod circuit;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use circuit::{
    candidate_ovcs, infer_part_phase, lattice_translates, locate_part, nearest_candidate,
    nearest_translate, Candidate,
};

use crate::codes::{
    ego_to_allo, AlloVector, CodeBook, DispBin, EgoVector, GridPhase, Heading, OvcCell,
};
use crate::config::{Config, Readout};
use crate::error::EngineError;
use crate::graph::{
    export_json, Association, Descriptor, EnvironmentId, MemoryGraph, NodeId, NodeRecord,
    PartLocation, Relation,
};
use crate::rng::{stream, Stream};

/// Part currently represented by the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivePart {
    pub node: NodeId,
    pub ovc: OvcCell,
    /// Grid-consistent agent-to-part vector the cell was read from.
    pub vector: AlloVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub ego: EgoVector,
    pub descriptor: Descriptor,
    pub environment: EnvironmentId,
}

/// Which input picked the object-vector cell among the grid-consistent ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Resolution {
    /// A learned or inferred displacement between the two parts.
    Edge,
    /// Nearness to the previously active cell, same part.
    Continuity,
    /// No relation available; nearness to the previous part's cell.
    Fallback,
}

impl Resolution {
    pub fn as_str(&self) -> &'static str {
        match self {
            Resolution::Edge => "EDGE",
            Resolution::Continuity => "CONTINUITY",
            Resolution::Fallback => "FALLBACK",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub node: NodeId,
    pub ovc: OvcCell,
    /// Grid-consistent vector behind `ovc`.
    pub vector: AlloVector,
    pub descriptor: Descriptor,
    pub candidates_considered: usize,
    pub resolved_by: Resolution,
    /// Relation used for the preference, if any.
    pub relation: Option<Relation>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserveOutcome {
    pub node: NodeId,
    pub ovc: OvcCell,
    pub node_allocated: bool,
    pub edge_learned: bool,
    pub association: Association,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MoveOutcome {
    /// Grid-consistent cells for the represented part; 0 when none is active.
    pub candidate_count: usize,
    /// The represented part left object-vector range and was dropped.
    pub range_exceeded: bool,
}

#[derive(Debug, Clone)]
pub struct Engine {
    config: Config,
    codes: CodeBook,
    graph: MemoryGraph,
    heading: Heading,
    agent_phase: GridPhase,
    active: Option<ActivePart>,
    engram_rng: ChaCha8Rng,
}

impl Engine {
    /// A fresh engine with an empty graph and a grid phase drawn from the
    /// seed's engine stream.
    pub fn new(config: Config, seed: u64) -> Result<Self, EngineError> {
        config.validate()?;
        let mut init = stream(seed, Stream::Engine);
        let agent_phase = GridPhase::new(init.random::<f64>(), init.random::<f64>());
        let codes = CodeBook::new(&config);
        Ok(Self {
            heading: codes.heading(0.0),
            codes,
            config,
            graph: MemoryGraph::new(),
            agent_phase,
            active: None,
            engram_rng: stream(seed, Stream::Engram),
        })
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn codes(&self) -> &CodeBook {
        &self.codes
    }

    pub fn graph(&self) -> &MemoryGraph {
        &self.graph
    }

    pub fn heading(&self) -> Heading {
        self.heading
    }

    pub fn agent_phase(&self) -> GridPhase {
        self.agent_phase
    }

    pub fn active(&self) -> Option<ActivePart> {
        self.active
    }

    /// Overrides the head-direction estimate (supplied from outside the engine).
    pub fn set_heading(&mut self, angle: f64) {
        self.heading = self.codes.heading(angle);
    }

    pub fn set_agent_phase(&mut self, phase: GridPhase) {
        self.agent_phase = phase;
    }

    fn location(&self, node: NodeId) -> Result<PartLocation, EngineError> {
        self.graph
            .node(node)?
            .location
            .ok_or(EngineError::NoGridLocation(node))
    }

    /// Grid-consistent object-vector cells for a stored part at the current agent phase.
    pub fn candidates(&self, node: NodeId) -> Result<Vec<Candidate>, EngineError> {
        let loc = self.location(node)?;
        Ok(candidate_ovcs(&self.codes, self.agent_phase, loc.phase))
    }

    /// Node already bound to what this observation shows, if any.
    pub fn recognize(&self, obs: &Observation) -> Option<NodeId> {
        let allo = ego_to_allo(obs.ego, &self.heading);
        let hint = self
            .codes
            .grid
            .cell(locate_part(&self.codes, self.agent_phase, allo));
        self.graph.recall_node(
            &obs.descriptor,
            Some(hint),
            obs.environment,
            self.config.descriptor.recall_threshold,
        )
    }

    /// Senses a part: recalls or allocates its node, binds its grid location
    /// and learns the displacement from the previously represented part.
    pub fn observe_part(&mut self, obs: &Observation) -> Result<ObserveOutcome, EngineError> {
        let allo = ego_to_allo(obs.ego, &self.heading);
        let ovc = self.codes.ovc.encode(allo)?;
        let loc = PartLocation::from_phase(
            locate_part(&self.codes, self.agent_phase, allo),
            &self.codes.grid,
        );
        let recalled = self.graph.recall_node(
            &obs.descriptor,
            Some(loc.cell),
            obs.environment,
            self.config.descriptor.recall_threshold,
        );
        let (node, node_allocated) = match recalled {
            Some(id) => (id, false),
            None => {
                let id = self.graph.allocate_node(
                    obs.descriptor.clone(),
                    obs.environment,
                    &self.config.engram,
                    &mut self.engram_rng,
                )?;
                (id, true)
            }
        };
        let association = self.graph.associate_grid(node, loc)?;
        let mut edge_learned = false;
        if let Some(prev) = self.active.filter(|p| p.node != node) {
            let disp = match self.config.readout {
                Readout::Translate => self.codes.disp.encode_vector(allo - prev.vector),
                Readout::DecodedCenter => self
                    .codes
                    .disp
                    .encode(self.codes.ovc.decode(prev.ovc), self.codes.ovc.decode(ovc)),
            };
            self.graph.learn_edge(prev.node, node, disp)?;
            edge_learned = true;
        }
        self.active = Some(ActivePart {
            node,
            ovc,
            vector: allo,
        });
        Ok(ObserveOutcome {
            node,
            ovc,
            node_allocated,
            edge_learned,
            association,
        })
    }

    /// Self-motion: advances the grid phase by the allocentric move, then
    /// turns. The represented part's cell follows the grid, preferring the
    /// candidate nearest to where the previous one would have moved. The part
    /// is dropped once no consistent candidate lies within range.
    pub fn path_integrate(&mut self, ego_move: EgoVector, turn: f64) -> MoveOutcome {
        let allo = ego_to_allo(ego_move, &self.heading);
        self.agent_phase = self.codes.grid.advance(self.agent_phase, allo);
        self.heading = self.heading.turned(turn, self.codes.heading_bins);
        let Some(active) = self.active else {
            return MoveOutcome::default();
        };
        let Ok(loc) = self.location(active.node) else {
            return MoveOutcome::default();
        };
        let translates = lattice_translates(&self.codes, self.agent_phase, loc.phase);
        let cands = candidate_ovcs(&self.codes, self.agent_phase, loc.phase);
        // the tracked vector is exact, so leaving range is seen directly
        let left = matches!(self.config.readout, Readout::Translate)
            && (active.vector - allo).norm() > self.codes.ovc.range();
        if cands.is_empty() || left {
            self.active = None;
            return MoveOutcome {
                candidate_count: 0,
                range_exceeded: true,
            };
        }
        if allo != AlloVector::ZERO {
            let best = match self.config.readout {
                Readout::Translate => {
                    nearest_translate(&self.codes, &translates, active.vector - allo)
                }
                Readout::DecodedCenter => nearest_candidate(
                    &self.codes,
                    &cands,
                    self.codes.ovc.decode(active.ovc) - allo,
                ),
            };
            if let Some(best) = best {
                self.active = Some(ActivePart {
                    node: active.node,
                    ovc: best.cell,
                    vector: best.vector,
                });
            }
        }
        MoveOutcome {
            candidate_count: cands.len(),
            range_exceeded: false,
        }
    }

    /// What the object-vector cells would show if attention moved to `target`
    /// now. Does not change the state.
    pub fn predict_observation(&self, target: NodeId) -> Result<Prediction, EngineError> {
        let record: &NodeRecord = self.graph.node(target)?;
        let active = self.active.ok_or(EngineError::NoActivePart)?;
        let loc = self.location(target)?;
        let cands = candidate_ovcs(&self.codes, self.agent_phase, loc.phase);
        let prediction = |cell: OvcCell, vector, resolved_by, relation| Prediction {
            node: target,
            ovc: cell,
            vector,
            descriptor: record.descriptor.clone(),
            candidates_considered: cands.len(),
            resolved_by,
            relation,
        };
        if target == active.node {
            return Ok(prediction(
                active.ovc,
                active.vector,
                Resolution::Continuity,
                None,
            ));
        }
        let relation = match self.config.strategy {
            Some(s) => self
                .graph
                .infer_relation(active.node, target, s, &self.codes.disp)?,
            None => None,
        };
        let (offset, resolved_by) = match relation {
            Some(r) => (r.vector, Resolution::Edge),
            None => (AlloVector::ZERO, Resolution::Fallback),
        };
        let best = match self.config.readout {
            Readout::Translate => {
                let mut translates = lattice_translates(&self.codes, self.agent_phase, loc.phase);
                // a one-hop bin is a region: keep only translates inside it when any are
                if let Some(bin) = relation.and_then(|r| r.bin) {
                    let inside: Vec<AlloVector> = translates
                        .iter()
                        .copied()
                        .filter(|&t| self.codes.disp.encode_vector(t - active.vector) == bin)
                        .collect();
                    if !inside.is_empty() {
                        translates = inside;
                    }
                }
                nearest_translate(&self.codes, &translates, active.vector + offset)
            }
            Readout::DecodedCenter => nearest_candidate(
                &self.codes,
                &cands,
                self.codes.ovc.decode(active.ovc) + offset,
            ),
        }
        .ok_or(EngineError::NoCandidateInRange(target))?;
        Ok(prediction(best.cell, best.vector, resolved_by, relation))
    }

    /// Moves attention to `target`, activating the predicted cell. Grid phase
    /// and heading are untouched.
    pub fn shift_attention(&mut self, target: NodeId) -> Result<Prediction, EngineError> {
        let pred = self.predict_observation(target)?;
        self.active = Some(ActivePart {
            node: target,
            ovc: pred.ovc,
            vector: pred.vector,
        });
        Ok(pred)
    }

    pub fn consolidate(&mut self, hop_limit: usize) -> usize {
        self.graph.consolidate(hop_limit, &self.codes.disp)
    }

    /// Whether the active cell is one of the grid-consistent cells of the
    /// active part. `None` when no part is represented.
    pub fn circuit_consistent(&self) -> Option<bool> {
        let active = self.active?;
        let cands = self.candidates(active.node).ok()?;
        Some(cands.iter().any(|c| c.cell == active.ovc))
    }

    /// Sharpens a coarse relation between two stored parts with the grid:
    /// the result ends on the center of `to`'s grid cell, starting from
    /// `from`'s stored phase.
    pub fn refine_relation(
        &self,
        from: NodeId,
        to: NodeId,
        relation: &Relation,
    ) -> Result<AlloVector, EngineError> {
        let start = self.location(from)?;
        let end = self.location(to)?;
        Ok(self.snap(
            start.phase,
            AlloVector::ZERO,
            &end,
            relation.vector,
            relation.bin,
        ))
    }

    /// Position of the last node of `path` relative to the first one's stored
    /// phase, decoded hop by hop: each hop's bin picks the translate onto the
    /// next node's grid cell center.
    pub fn decode_chain(&self, path: &[NodeId]) -> Result<AlloVector, EngineError> {
        let Some((&first, _)) = path.split_first() else {
            return Ok(AlloVector::ZERO);
        };
        let origin = self.location(first)?.phase;
        let mut pos = AlloVector::ZERO;
        for hop in path.windows(2) {
            let bin = self
                .graph
                .hop_bin(hop[0], hop[1], &self.codes.disp)
                .ok_or(EngineError::NoRelation(hop[0], hop[1]))?;
            let end = self.location(hop[1])?;
            pos = self.snap(origin, pos, &end, self.codes.disp.decode(bin), Some(bin));
        }
        Ok(pos)
    }

    /// [`Self::decode_chain`] along the graph's tightest chain between two parts.
    pub fn decode_part(&self, from: NodeId, to: NodeId) -> Result<AlloVector, EngineError> {
        let path = self
            .graph
            .tightest_chain(from, to, &self.codes.disp)?
            .ok_or(EngineError::NoRelation(from, to))?;
        self.decode_chain(&path)
    }

    /// The lattice translate onto `to`'s cell center, measured from `origin`,
    /// closest to `from_pos + hop`. Translates whose hop from `from_pos` lies
    /// inside `bin` win when there are any.
    fn snap(
        &self,
        origin: GridPhase,
        from_pos: AlloVector,
        to: &PartLocation,
        hop: AlloVector,
        bin: Option<DispBin>,
    ) -> AlloVector {
        let grid = &self.codes.grid;
        let expected = from_pos + hop;
        let nearest =
            expected + grid.diff(grid.advance(origin, expected), grid.cell_center(to.cell));
        let Some(bin) = bin else {
            return nearest;
        };
        (-2..=2)
            .flat_map(|i| (-2..=2).map(move |j| nearest + grid.lattice_vector(i, j)))
            .filter(|&t| self.codes.disp.encode_vector(t - from_pos) == bin)
            .min_by(|a, b| a.distance(&expected).total_cmp(&b.distance(&expected)))
            .unwrap_or(nearest)
    }

    /// Hash of the full belief state, graph included.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.agent_phase.u().to_bits().hash(&mut h);
        self.agent_phase.v().to_bits().hash(&mut h);
        self.heading.angle().to_bits().hash(&mut h);
        if let Some(a) = self.active {
            a.node.hash(&mut h);
            a.ovc.hash(&mut h);
            a.vector.dx.to_bits().hash(&mut h);
            a.vector.dy.to_bits().hash(&mut h);
        }
        export_json(&self.graph).hash(&mut h);
        h.finish()
    }
}
