//! Displacement cells: a coarse log-polar code for the jump between two
//! successively active object vectors.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::frame::AlloVector;
use super::logpolar::{LogPolarCode, OuterEdge};
use crate::config::DispParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DispBin {
    /// Sub-threshold displacement.
    Zero,
    Bin {
        dir_bin: u32,
        ring: u32,
    },
}

impl DispBin {
    pub fn dir_bin(&self) -> Option<u32> {
        match self {
            DispBin::Zero => None,
            DispBin::Bin { dir_bin, .. } => Some(*dir_bin),
        }
    }

    pub fn ring(&self) -> Option<u32> {
        match self {
            DispBin::Zero => None,
            DispBin::Bin { ring, .. } => Some(*ring),
        }
    }
}

impl fmt::Display for DispBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DispBin::Zero => write!(f, "ZERO"),
            DispBin::Bin { dir_bin, ring } => write!(f, "d{dir_bin}r{ring}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispCode {
    bins: LogPolarCode,
    still: f64,
}

impl DispCode {
    pub fn new(p: &DispParams) -> Self {
        Self {
            bins: LogPolarCode::new(p.sectors, p.rings, p.d0, p.growth, p.still, OuterEdge::Open),
            still: p.still,
        }
    }

    pub fn sectors(&self) -> u32 {
        self.bins.sectors()
    }

    pub fn rings(&self) -> u32 {
        self.bins.rings()
    }

    /// Bins `to - from`.
    pub fn encode(&self, from: AlloVector, to: AlloVector) -> DispBin {
        self.encode_vector(to - from)
    }

    pub fn encode_vector(&self, d: AlloVector) -> DispBin {
        let r = d.norm();
        if r < self.still {
            return DispBin::Zero;
        }
        DispBin::Bin {
            dir_bin: self.bins.sector_of(d),
            ring: self.bins.ring_of(r),
        }
    }

    pub fn decode(&self, b: DispBin) -> AlloVector {
        match b {
            DispBin::Zero => AlloVector::ZERO,
            DispBin::Bin { dir_bin, ring } => self.bins.center(dir_bin, ring),
        }
    }

    /// The bin of the reversed displacement.
    pub fn negate(&self, b: DispBin) -> DispBin {
        match b {
            DispBin::Zero => DispBin::Zero,
            DispBin::Bin { dir_bin, ring } => DispBin::Bin {
                dir_bin: (dir_bin + self.sectors() / 2) % self.sectors(),
                ring,
            },
        }
    }

    /// Largest distance between the decoded center and any displacement the
    /// bin covers; infinite for the open outermost ring.
    pub fn half_width(&self, b: DispBin) -> f64 {
        match b {
            DispBin::Zero => self.still,
            DispBin::Bin { ring, .. } => self.bins.half_width(ring),
        }
    }

    /// Every non-zero bin of the code book.
    pub fn bins(&self) -> impl Iterator<Item = DispBin> + '_ {
        (0..self.rings()).flat_map(move |ring| {
            (0..self.sectors()).map(move |dir_bin| DispBin::Bin { dir_bin, ring })
        })
    }

    pub fn code(&self) -> &LogPolarCode {
        &self.bins
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code() -> DispCode {
        DispCode::new(&DispParams::default())
    }

    #[test]
    fn identical_vectors_are_zero() {
        let c = code();
        let a = AlloVector::new(1.3, -2.0);
        assert_eq!(c.encode(a, a), DispBin::Zero);
        assert_eq!(c.encode(a, a + AlloVector::new(0.049, 0.0)), DispBin::Zero);
        assert_ne!(c.encode(a, a + AlloVector::new(0.05, 0.0)), DispBin::Zero);
        assert_eq!(c.decode(DispBin::Zero), AlloVector::ZERO);
    }

    #[test]
    fn swapped_arguments_are_antipodal() {
        let c = code();
        let a = AlloVector::new(0.4, 1.1);
        let b = AlloVector::new(-2.2, 0.3);
        let ab = c.encode(a, b);
        let ba = c.encode(b, a);
        assert_eq!(ab.ring(), ba.ring());
        assert_eq!((ab.dir_bin().unwrap() + 8) % 16, ba.dir_bin().unwrap());
        assert_eq!(c.negate(ab), ba);
    }

    #[test]
    fn centers_are_contained_and_negation_is_exact() {
        let c = code();
        for b in c.bins() {
            assert_eq!(c.encode(AlloVector::ZERO, c.decode(b)), b);
            assert_eq!(c.decode(c.negate(b)), -c.decode(b));
            assert_eq!(c.negate(c.negate(b)), b);
        }
    }

    #[test]
    fn far_displacements_land_in_open_outer_ring() {
        let c = code();
        let b = c.encode_vector(AlloVector::new(40.0, 0.0));
        assert_eq!(b.ring(), Some(c.rings() - 1));
        assert!(c.half_width(b).is_infinite());
    }
}
