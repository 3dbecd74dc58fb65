//! The three-way circuit between agent grid phase, object-vector cell and
//! part grid location.

use std::collections::BTreeMap;

use crate::codes::{AlloVector, CodeBook, GridPhase, OvcCell};

/// An object-vector cell consistent with the grid constraint, with the
/// lattice translate that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub cell: OvcCell,
    /// Shortest agent-to-part vector within the cell that lands exactly on
    /// the part phase.
    pub vector: AlloVector,
}

/// Part phase implied by the agent phase and an object-vector cell, read out
/// at the cell's decoded center.
pub fn infer_part_phase(codes: &CodeBook, agent: GridPhase, ovc: OvcCell) -> GridPhase {
    codes.grid.advance(agent, codes.ovc.decode(ovc))
}

/// Part phase implied by the agent phase and the sensed allocentric vector.
pub fn locate_part(codes: &CodeBook, agent: GridPhase, sensed: AlloVector) -> GridPhase {
    codes.grid.advance(agent, sensed)
}

/// Every agent-to-part vector within object-vector range that lands exactly
/// on `part`: the lattice translates of the phase difference. Unsorted.
pub fn lattice_translates(codes: &CodeBook, agent: GridPhase, part: GridPhase) -> Vec<AlloVector> {
    let grid = &codes.grid;
    let range = codes.ovc.range();
    let base = grid.diff(agent, part);
    // lattice coefficients of any vector w satisfy |i|, |j| <= |w|·2/(P·√3)
    let reach = (range + grid.covering_radius()) * 2.0 / (grid.period() * 3f64.sqrt());
    let k = reach.ceil() as i64;
    let mut out = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            let t = base + grid.lattice_vector(i, j);
            let r = t.norm();
            if r > 0.0 && r <= range {
                out.push(t);
            }
        }
    }
    out
}

/// Every object-vector cell reachable from the agent phase along a lattice
/// translate of the phase difference that ends on `part` and stays in range.
/// Sorted by `(ring, dir_bin)`; each cell keeps its shortest translate.
pub fn candidate_ovcs(codes: &CodeBook, agent: GridPhase, part: GridPhase) -> Vec<Candidate> {
    let mut cells: BTreeMap<(u32, u32), Candidate> = BTreeMap::new();
    for t in lattice_translates(codes, agent, part) {
        let Ok(cell) = codes.ovc.encode(t) else {
            continue;
        };
        let entry = cells
            .entry((cell.ring, cell.dir_bin))
            .or_insert(Candidate { cell, vector: t });
        if t.norm() < entry.vector.norm() {
            entry.vector = t;
        }
    }
    cells.into_values().collect()
}

/// The translate closest to `preferred`, with its cell; ties go to the
/// smaller ring, then the smaller sector.
pub fn nearest_translate(
    codes: &CodeBook,
    translates: &[AlloVector],
    preferred: AlloVector,
) -> Option<Candidate> {
    translates
        .iter()
        .filter_map(|&t| {
            codes
                .ovc
                .encode(t)
                .ok()
                .map(|cell| Candidate { cell, vector: t })
        })
        .min_by(|a, b| {
            a.vector
                .distance(&preferred)
                .total_cmp(&b.vector.distance(&preferred))
                .then(a.cell.ring.cmp(&b.cell.ring))
                .then(a.cell.dir_bin.cmp(&b.cell.dir_bin))
        })
}

/// The candidate whose decoded center is closest to `preferred`; ties go to
/// the smaller ring, then the smaller sector.
pub fn nearest_candidate(
    codes: &CodeBook,
    candidates: &[Candidate],
    preferred: AlloVector,
) -> Option<Candidate> {
    candidates.iter().copied().min_by(|a, b| {
        let da = codes.ovc.decode(a.cell).distance(&preferred);
        let db = codes.ovc.decode(b.cell).distance(&preferred);
        da.total_cmp(&db)
            .then(a.cell.ring.cmp(&b.cell.ring))
            .then(a.cell.dir_bin.cmp(&b.cell.dir_bin))
    })
}
