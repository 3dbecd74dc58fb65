//! The fast-learned memory graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;

use super::pattern::{Descriptor, Engram};
use super::{
    EdgeRecord, EnvironmentId, InferenceStrategy, NodeId, NodeRecord, PartLocation, Provenance,
    Relation,
};
use crate::codes::{AlloVector, DispBin, DispCode, GridCell};
use crate::config::EngramParams;
use crate::error::GraphError;

const MAX_ENGRAM_ATTEMPTS: u32 = 100;

/// Outcome of binding a grid location to a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Association {
    /// First location for this node.
    Stored,
    /// Same grid cell as before; the fine phase is refreshed.
    Unchanged,
    /// A different grid cell replaced the previous one.
    Relocated,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MemoryGraph {
    nodes: BTreeMap<NodeId, NodeRecord>,
    edges: BTreeMap<(NodeId, NodeId), EdgeRecord>,
    /// Temporal adjacency: nodes joined by an observed transition, either way.
    adjacency: BTreeMap<NodeId, BTreeSet<NodeId>>,
    next_id: u32,
    relocations: u64,
}

/// Breadth-first tree of aggregated displacements from one source node.
struct PathTree {
    reached: BTreeMap<NodeId, (AlloVector, usize)>,
}

impl MemoryGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn from_parts(
        nodes: Vec<NodeRecord>,
        edges: Vec<EdgeRecord>,
    ) -> Result<Self, GraphError> {
        let mut g = MemoryGraph::new();
        for n in nodes {
            if g.nodes.contains_key(&n.id) {
                return Err(GraphError::Import(format!("duplicate node id {}", n.id)));
            }
            g.next_id = g.next_id.max(n.id.0 + 1);
            g.adjacency.insert(n.id, BTreeSet::new());
            g.nodes.insert(n.id, n);
        }
        for e in edges {
            g.require(e.from)?;
            g.require(e.to)?;
            if e.from == e.to {
                return Err(GraphError::SelfEdge(e.from));
            }
            if g.edges.contains_key(&(e.from, e.to)) {
                return Err(GraphError::Import(format!(
                    "duplicate edge {} -> {}",
                    e.from, e.to
                )));
            }
            g.insert_edge(e);
        }
        Ok(g)
    }

    fn require(&self, id: NodeId) -> Result<&NodeRecord, GraphError> {
        self.nodes.get(&id).ok_or(GraphError::UnknownNode(id))
    }

    pub fn node(&self, id: NodeId) -> Result<&NodeRecord, GraphError> {
        self.require(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeRecord> {
        self.nodes.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &EdgeRecord> {
        self.edges.values()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn consolidated_edge_count(&self) -> usize {
        self.edges
            .values()
            .filter(|e| e.provenance == Provenance::Consolidated)
            .count()
    }

    /// Number of times a node's grid cell was replaced by a different one.
    pub fn relocations(&self) -> u64 {
        self.relocations
    }

    /// Allocates a fresh node whose engram overlaps every existing engram in
    /// at most `overlap_max` bits.
    pub fn allocate_node<R: Rng + ?Sized>(
        &mut self,
        descriptor: Descriptor,
        environment: EnvironmentId,
        params: &EngramParams,
        rng: &mut R,
    ) -> Result<NodeId, GraphError> {
        let limit = params.overlap_max as usize;
        let engram = (0..MAX_ENGRAM_ATTEMPTS)
            .map(|_| Engram::random(rng, params.dim, params.active))
            .find(|e| self.nodes.values().all(|n| n.engram.overlap(e) <= limit))
            .ok_or(GraphError::PatternSpaceExhausted(MAX_ENGRAM_ATTEMPTS))?;
        let id = NodeId(self.next_id);
        self.next_id += 1;
        self.nodes.insert(
            id,
            NodeRecord {
                id,
                descriptor,
                engram,
                location: None,
                environment,
            },
        );
        self.adjacency.insert(id, BTreeSet::new());
        Ok(id)
    }

    pub fn associate_grid(
        &mut self,
        id: NodeId,
        loc: PartLocation,
    ) -> Result<Association, GraphError> {
        let node = self.nodes.get_mut(&id).ok_or(GraphError::UnknownNode(id))?;
        let outcome = match node.location {
            None => Association::Stored,
            Some(prev) if prev.cell == loc.cell => Association::Unchanged,
            Some(_) => Association::Relocated,
        };
        node.location = Some(loc);
        if outcome == Association::Relocated {
            self.relocations += 1;
        }
        Ok(outcome)
    }

    fn insert_edge(&mut self, e: EdgeRecord) {
        if e.provenance == Provenance::Observed {
            self.adjacency.entry(e.from).or_default().insert(e.to);
            self.adjacency.entry(e.to).or_default().insert(e.from);
        }
        self.edges.insert((e.from, e.to), e);
    }

    /// Stores an observed transition; a repeated pair keeps the latest bin.
    pub fn learn_edge(
        &mut self,
        from: NodeId,
        to: NodeId,
        disp: DispBin,
    ) -> Result<(), GraphError> {
        self.require(from)?;
        self.require(to)?;
        if from == to {
            return Err(GraphError::SelfEdge(from));
        }
        self.insert_edge(EdgeRecord {
            from,
            to,
            disp,
            provenance: Provenance::Observed,
        });
        Ok(())
    }

    pub fn lookup_edge(&self, from: NodeId, to: NodeId) -> Result<Option<DispBin>, GraphError> {
        Ok(self.edge(from, to)?.map(|e| e.disp))
    }

    pub fn edge(&self, from: NodeId, to: NodeId) -> Result<Option<&EdgeRecord>, GraphError> {
        self.require(from)?;
        self.require(to)?;
        Ok(self.edges.get(&(from, to)))
    }

    /// Temporally adjacent nodes: those joined to `id` by an observed
    /// transition in either direction.
    pub fn neighbors(&self, id: NodeId) -> Result<BTreeSet<NodeId>, GraphError> {
        self.require(id)?;
        Ok(self.adjacency.get(&id).cloned().unwrap_or_default())
    }

    fn usable(&self, e: &EdgeRecord, observed_only: bool) -> bool {
        !observed_only || e.provenance == Provenance::Observed
    }

    /// Decoded step from `u` to `v`: the forward edge if stored, otherwise
    /// the negated reverse edge.
    fn step(
        &self,
        u: NodeId,
        v: NodeId,
        observed_only: bool,
        code: &DispCode,
    ) -> Option<AlloVector> {
        if let Some(e) = self
            .edges
            .get(&(u, v))
            .filter(|e| self.usable(e, observed_only))
        {
            return Some(code.decode(e.disp));
        }
        self.edges
            .get(&(v, u))
            .filter(|e| self.usable(e, observed_only))
            .map(|e| -code.decode(e.disp))
    }

    fn links(&self, observed_only: bool) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
        let mut links: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for e in self
            .edges
            .values()
            .filter(|e| self.usable(e, observed_only))
        {
            links.entry(e.from).or_default().insert(e.to);
            links.entry(e.to).or_default().insert(e.from);
        }
        links
    }

    /// Fewest-hop paths from `source`, each edge walkable forward or, negated,
    /// backward. Neighbors are expanded in id order, so the tree is unique.
    fn path_tree(
        &self,
        source: NodeId,
        max_hops: usize,
        observed_only: bool,
        code: &DispCode,
    ) -> PathTree {
        let links = self.links(observed_only);
        let mut reached = BTreeMap::new();
        reached.insert(source, (AlloVector::ZERO, 0));
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let (acc, hops) = reached[&u];
            if hops == max_hops {
                continue;
            }
            for &v in links.get(&u).into_iter().flatten() {
                if reached.contains_key(&v) {
                    continue;
                }
                let Some(step) = self.step(u, v, observed_only, code) else {
                    continue;
                };
                reached.insert(v, (acc + step, hops + 1));
                queue.push_back(v);
            }
        }
        PathTree { reached }
    }

    /// Bin for the hop `u → v`: the stored edge, or the negated reverse edge.
    pub fn hop_bin(&self, u: NodeId, v: NodeId, code: &DispCode) -> Option<DispBin> {
        self.edges
            .get(&(u, v))
            .map(|e| e.disp)
            .or_else(|| self.edges.get(&(v, u)).map(|e| code.negate(e.disp)))
    }

    /// Path from `from` to `to` whose widest hop bin is as narrow as
    /// possible, then with the fewest hops. Edges are walkable both ways.
    pub fn tightest_chain(
        &self,
        from: NodeId,
        to: NodeId,
        code: &DispCode,
    ) -> Result<Option<Vec<NodeId>>, GraphError> {
        self.require(from)?;
        self.require(to)?;
        if from == to {
            return Ok(Some(vec![from]));
        }
        let links = self.links(false);
        let width = |u: NodeId, v: NodeId| {
            self.hop_bin(u, v, code)
                .map_or(f64::INFINITY, |b| code.half_width(b))
        };
        let mut limits: Vec<f64> = self
            .edges
            .values()
            .map(|e| code.half_width(e.disp))
            .collect();
        limits.sort_by(f64::total_cmp);
        limits.dedup();
        for limit in limits {
            let mut parent: BTreeMap<NodeId, NodeId> = BTreeMap::new();
            let mut queue = VecDeque::from([from]);
            parent.insert(from, from);
            while let Some(u) = queue.pop_front() {
                for &v in links.get(&u).into_iter().flatten() {
                    if parent.contains_key(&v) || width(u, v) > limit {
                        continue;
                    }
                    parent.insert(v, u);
                    if v == to {
                        let mut path = vec![to];
                        while *path.last().unwrap() != from {
                            path.push(parent[path.last().unwrap()]);
                        }
                        path.reverse();
                        return Ok(Some(path));
                    }
                    queue.push_back(v);
                }
            }
        }
        Ok(None)
    }

    /// Displacement estimate from part `from` to part `to`.
    pub fn infer_relation(
        &self,
        from: NodeId,
        to: NodeId,
        strategy: InferenceStrategy,
        code: &DispCode,
    ) -> Result<Option<Relation>, GraphError> {
        self.require(from)?;
        self.require(to)?;
        if from == to {
            return Ok(Some(Relation {
                vector: AlloVector::ZERO,
                hops: 0,
                bin: None,
            }));
        }
        let direct = |f: NodeId, t: NodeId| self.edges.get(&(f, t)).map(|e| e.disp);
        let one_hop = |bin: DispBin| Relation {
            vector: code.decode(bin),
            hops: 1,
            bin: Some(bin),
        };
        let rel = match strategy {
            InferenceStrategy::LearnedOnly => direct(from, to).map(one_hop),
            InferenceStrategy::WithReverse => direct(from, to)
                .or_else(|| direct(to, from).map(|b| code.negate(b)))
                .map(one_hop),
            InferenceStrategy::PathAggregate => self
                .path_tree(from, usize::MAX, false, code)
                .reached
                .get(&to)
                .map(|&(vector, hops)| Relation {
                    vector,
                    hops,
                    bin: if hops == 1 {
                        direct(from, to).or_else(|| direct(to, from).map(|b| code.negate(b)))
                    } else {
                        None
                    },
                }),
        };
        Ok(rel)
    }

    /// Fills in edges for every ordered pair that lacks an observed edge but
    /// is joined by an observed path of at most `hop_limit` hops. Bins are
    /// re-encoded from the aggregated vector. Returns the number of pairs
    /// that gained an edge.
    pub fn consolidate(&mut self, hop_limit: usize, code: &DispCode) -> usize {
        let mut fills = Vec::new();
        for &a in self.nodes.keys() {
            let tree = self.path_tree(a, hop_limit.max(1), true, code);
            for (&b, &(vector, _)) in &tree.reached {
                if a == b {
                    continue;
                }
                let observed = self
                    .edges
                    .get(&(a, b))
                    .is_some_and(|e| e.provenance == Provenance::Observed);
                if !observed {
                    fills.push(EdgeRecord {
                        from: a,
                        to: b,
                        disp: code.encode_vector(vector),
                        provenance: Provenance::Consolidated,
                    });
                }
            }
        }
        let mut added = 0;
        for e in fills {
            if !self.edges.contains_key(&(e.from, e.to)) {
                added += 1;
            }
            self.insert_edge(e);
        }
        added
    }

    /// Content-addressable recall within one environment. Several matches
    /// are narrowed by the grid hint; an unresolved tie yields `None`.
    pub fn recall_node(
        &self,
        descriptor: &Descriptor,
        hint: Option<GridCell>,
        environment: EnvironmentId,
        threshold: f64,
    ) -> Option<NodeId> {
        let matches: Vec<&NodeRecord> = self
            .nodes
            .values()
            .filter(|n| {
                n.environment == environment && n.descriptor.similarity(descriptor) >= threshold
            })
            .collect();
        match matches.as_slice() {
            [] => None,
            [only] => Some(only.id),
            many => {
                let hinted: Vec<NodeId> = many
                    .iter()
                    .filter(|n| hint.is_some() && n.location.map(|l| l.cell) == hint)
                    .map(|n| n.id)
                    .collect();
                match hinted.as_slice() {
                    [only] => Some(*only),
                    _ => None,
                }
            }
        }
    }
}
