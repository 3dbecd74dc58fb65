//! Memory graph: engram nodes bound to part descriptors and grid locations,
//! directed edges carrying coarse displacement bins.

mod export;
mod pattern;
mod store;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codes::{AlloVector, DispBin, GridCell, GridModule, GridPhase};

pub use export::{export_dot, export_json, import_json};
pub use pattern::{overlap, Descriptor, Engram};
pub use store::{Association, MemoryGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

pub type EnvironmentId = u32;

/// Where a part sits on the grid: the active grid cell plus the fine phase
/// read out from the grid population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartLocation {
    pub cell: GridCell,
    pub phase: GridPhase,
}

impl PartLocation {
    pub fn from_phase(phase: GridPhase, grid: &GridModule) -> Self {
        Self {
            cell: grid.cell(phase),
            phase,
        }
    }

    /// A location known only to cell resolution; the phase is the cell center.
    pub fn from_cell(cell: GridCell, grid: &GridModule) -> Self {
        Self {
            cell,
            phase: grid.cell_center(cell),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub id: NodeId,
    pub descriptor: Descriptor,
    /// Empty for nodes restored from an export.
    pub engram: Engram,
    pub location: Option<PartLocation>,
    pub environment: EnvironmentId,
}

impl NodeRecord {
    pub fn part_grid(&self) -> Option<GridCell> {
        self.location.map(|l| l.cell)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Observed,
    Consolidated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRecord {
    pub from: NodeId,
    pub to: NodeId,
    pub disp: DispBin,
    pub provenance: Provenance,
}

/// How a relation between two parts is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InferenceStrategy {
    /// Only a stored edge in the queried direction.
    LearnedOnly,
    /// A stored edge, or the negation of the stored reverse edge.
    WithReverse,
    /// Fewest-hop path over stored edges, summing decoded bin centers.
    PathAggregate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relation {
    pub vector: AlloVector,
    pub hops: usize,
    /// The bin behind a one-hop relation (negated when read off the reverse edge).
    pub bin: Option<DispBin>,
}
