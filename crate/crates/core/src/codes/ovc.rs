//! Object-vector cells: a log-polar code of the allocentric vector from the
//! agent to the attended part, with fields that widen with distance.

use serde::{Deserialize, Serialize};

use super::frame::AlloVector;
use super::logpolar::{LogPolarCode, OuterEdge};
use crate::config::OvcParams;
use crate::error::CodeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OvcCell {
    pub dir_bin: u32,
    pub ring: u32,
}

impl OvcCell {
    pub const fn new(dir_bin: u32, ring: u32) -> Self {
        Self { dir_bin, ring }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OvcCode {
    bins: LogPolarCode,
}

impl OvcCode {
    pub fn new(p: &OvcParams) -> Self {
        Self {
            bins: LogPolarCode::new(p.sectors, p.rings, p.r0, p.growth, 0.0, OuterEdge::Closed),
        }
    }

    /// Object-vector range `r0·g^rings`.
    pub fn range(&self) -> f64 {
        self.bins.max_radius()
    }

    pub fn sectors(&self) -> u32 {
        self.bins.sectors()
    }

    pub fn rings(&self) -> u32 {
        self.bins.rings()
    }

    pub fn encode(&self, v: AlloVector) -> Result<OvcCell, CodeError> {
        let r = v.norm();
        if r.is_nan() || r <= 0.0 || r > self.range() {
            return Err(CodeError::OutOfRange {
                radius: r,
                max: self.range(),
            });
        }
        Ok(OvcCell::new(self.bins.sector_of(v), self.bins.ring_of(r)))
    }

    pub fn decode(&self, cell: OvcCell) -> AlloVector {
        self.bins.center(cell.dir_bin, cell.ring)
    }

    /// Every cell of the code book, ring-major.
    pub fn cells(&self) -> impl Iterator<Item = OvcCell> + '_ {
        (0..self.rings())
            .flat_map(move |ring| (0..self.sectors()).map(move |d| OvcCell::new(d, ring)))
    }

    pub fn ring_width(&self, ring: u32) -> f64 {
        self.bins.ring_width(ring)
    }

    /// Largest distance from a cell's decoded center to any vector it encodes.
    pub fn half_width(&self, ring: u32) -> f64 {
        self.bins.half_width(ring)
    }

    pub fn bins(&self) -> &LogPolarCode {
        &self.bins
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code() -> OvcCode {
        OvcCode::new(&OvcParams::default())
    }

    #[test]
    fn innermost_first_sector() {
        let c = code();
        assert_eq!(
            c.encode(AlloVector::new(0.125, 0.0)).unwrap(),
            OvcCell::new(0, 0)
        );
    }

    #[test]
    fn range_boundary_lands_in_outer_ring() {
        let c = code();
        for deg in [0.0_f64, 33.0, 190.0, 359.0] {
            let v = AlloVector::from_polar(c.range(), deg.to_radians());
            // from_polar may land a hair outside; pull it onto the boundary
            let v = v * (c.range() / v.norm()).min(1.0);
            assert_eq!(c.encode(v).unwrap().ring, 9);
        }
    }

    #[test]
    fn out_of_range_and_zero_rejected() {
        let c = code();
        assert!(c.encode(AlloVector::ZERO).is_err());
        assert!(c.encode(AlloVector::new(c.range() * 1.0001, 0.0)).is_err());
        assert!(c.encode(AlloVector::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn decode_first_cell() {
        // ring edges 0.25 and 0.35, sector 0 of 24 spans [0°, 15°)
        let v = code().decode(OvcCell::new(0, 0));
        let expected_r = (0.25_f64 * 0.35).sqrt();
        assert!((v.norm() - expected_r).abs() < 1e-12);
        assert!((v.norm() - 0.2958).abs() < 1e-4);
        assert!((v.angle().to_degrees() - 7.5).abs() < 1e-12);
    }

    #[test]
    fn every_cell_contains_its_center() {
        let c = code();
        for cell in c.cells() {
            assert_eq!(c.encode(c.decode(cell)).unwrap(), cell);
        }
    }

    #[test]
    fn decoded_radius_and_width_grow_with_ring() {
        let c = code();
        for ring in 1..c.rings() {
            let inner = c.decode(OvcCell::new(3, ring - 1)).norm();
            let outer = c.decode(OvcCell::new(3, ring)).norm();
            assert!(outer > inner);
            assert!(c.ring_width(ring) > c.ring_width(ring - 1));
            let expected = 0.25 * 1.4_f64.powi(ring as i32) * 0.4;
            assert!((c.ring_width(ring) - expected).abs() < 1e-12);
        }
    }
}
