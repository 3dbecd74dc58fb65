//! A single grid-cell module: phase on the rhombic unit cell of a hexagonal
//! lattice, path integration by phase advance, and the lattice arithmetic
//! used to route between grid phases and vectors.

use serde::{Deserialize, Serialize};

use super::frame::{AlloVector, Point};
use crate::config::GridParams;

const SQRT3: f64 = 1.732_050_807_568_877_2;

fn unit_wrap(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

fn centered(x: f64) -> f64 {
    x - x.round()
}

/// Position on the module's rhombic unit cell, both coordinates in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPhase {
    u: f64,
    v: f64,
}

impl GridPhase {
    pub const ORIGIN: GridPhase = GridPhase { u: 0.0, v: 0.0 };

    /// Builds a phase, wrapping both coordinates onto the torus.
    pub fn new(u: f64, v: f64) -> Self {
        Self {
            u: unit_wrap(u),
            v: unit_wrap(v),
        }
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// Euclidean distance on the unit torus, in phase units.
    pub fn torus_distance(&self, other: &GridPhase) -> f64 {
        centered(self.u - other.u).hypot(centered(self.v - other.v))
    }
}

/// Index of the single active grid cell: the phase quantized `M × M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridCell {
    pub iu: u32,
    pub iv: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridModule {
    period: f64,
    resolution: u32,
}

impl GridModule {
    pub fn new(p: &GridParams) -> Self {
        Self {
            period: p.period,
            resolution: p.resolution,
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Phase-coordinate displacement `(du, dv)` with `d = du·b1 + dv·b2`.
    pub fn phase_coords(&self, d: AlloVector) -> (f64, f64) {
        let dv = 2.0 * d.dy / (self.period * SQRT3);
        let du = d.dx / self.period - dv / 2.0;
        (du, dv)
    }

    /// Vector `du·b1 + dv·b2` for `b1 = (P, 0)`, `b2 = (P/2, P·√3/2)`.
    pub fn vector(&self, du: f64, dv: f64) -> AlloVector {
        AlloVector::new(
            self.period * (du + dv / 2.0),
            self.period * dv * SQRT3 / 2.0,
        )
    }

    pub fn lattice_vector(&self, i: i64, j: i64) -> AlloVector {
        self.vector(i as f64, j as f64)
    }

    pub fn world_to_phase(&self, p: Point) -> GridPhase {
        let (u, v) = self.phase_coords(AlloVector::new(p.x, p.y));
        GridPhase::new(u, v)
    }

    /// Path integration: moves the phase by the allocentric displacement `d`.
    pub fn advance(&self, phase: GridPhase, d: AlloVector) -> GridPhase {
        let (du, dv) = self.phase_coords(d);
        GridPhase::new(phase.u + du, phase.v + dv)
    }

    /// Shortest vector `d` with `advance(a, d) == b`.
    pub fn diff(&self, a: GridPhase, b: GridPhase) -> AlloVector {
        let du = b.u - a.u;
        let dv = b.v - a.v;
        let (nu, nv) = (du.round(), dv.round());
        let mut best = (f64::INFINITY, AlloVector::ZERO);
        // the nearest lattice point is a corner of the rhombus holding the
        // rounded representative, so a 3 × 3 neighbourhood suffices
        for ou in -1..=1 {
            for ov in -1..=1 {
                let cand = self.vector(du + (ou as f64 - nu), dv + (ov as f64 - nv));
                let n2 = cand.dx * cand.dx + cand.dy * cand.dy;
                if n2 < best.0 {
                    best = (n2, cand);
                }
            }
        }
        best.1
    }

    pub fn cell(&self, phase: GridPhase) -> GridCell {
        let m = self.resolution;
        let q = |x: f64| ((x * m as f64).floor() as u32).min(m - 1);
        GridCell {
            iu: q(phase.u),
            iv: q(phase.v),
        }
    }

    pub fn cell_center(&self, cell: GridCell) -> GridPhase {
        let m = self.resolution as f64;
        GridPhase::new((cell.iu as f64 + 0.5) / m, (cell.iv as f64 + 0.5) / m)
    }

    /// Largest distance from any point to its nearest lattice point, `P/√3`.
    pub fn covering_radius(&self) -> f64 {
        self.period / SQRT3
    }

    /// Largest distance from a grid cell's center to a point inside it:
    /// half the long diagonal of the `P/M` rhombus.
    pub fn cell_radius(&self) -> f64 {
        self.period / self.resolution as f64 * SQRT3 / 2.0
    }
}
