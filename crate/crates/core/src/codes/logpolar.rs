//! Log-polar binning shared by the object-vector and displacement codes.
//!
//! Ring `k` nominally spans `[r0·g^k, r0·g^(k+1))`; the innermost ring is
//! extended inward to `floor` so that short vectors stay encodable. Sectors
//! are half-open angular intervals starting at angle 0.

use std::f64::consts::TAU;

use super::frame::AlloVector;

/// How the outermost ring is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterEdge {
    /// The outermost ring ends at `r0·g^rings`, inclusive.
    Closed,
    /// The outermost ring absorbs everything beyond its inner edge.
    Open,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogPolarCode {
    sectors: u32,
    rings: u32,
    r0: f64,
    growth: f64,
    floor: f64,
    outer: OuterEdge,
    edges: Vec<f64>,
}

impl LogPolarCode {
    pub fn new(
        sectors: u32,
        rings: u32,
        r0: f64,
        growth: f64,
        floor: f64,
        outer: OuterEdge,
    ) -> Self {
        let edges = (0..=rings).map(|k| r0 * growth.powi(k as i32)).collect();
        Self {
            sectors,
            rings,
            r0,
            growth,
            floor,
            outer,
            edges,
        }
    }

    pub fn sectors(&self) -> u32 {
        self.sectors
    }

    pub fn rings(&self) -> u32 {
        self.rings
    }

    /// Nominal edge `r0·g^k`, for `k` in `0..=rings`.
    pub fn edge(&self, k: u32) -> f64 {
        self.edges[k as usize]
    }

    /// Outer edge of the outermost ring.
    pub fn max_radius(&self) -> f64 {
        self.edges[self.rings as usize]
    }

    pub fn sector_width(&self) -> f64 {
        TAU / self.sectors as f64
    }

    fn antipodal(&self) -> bool {
        self.sectors.is_multiple_of(2)
    }

    /// Sector containing the direction of `v`. For an even sector count the
    /// lower half-plane is folded onto the upper one, so `sector(-v)` is
    /// always `sector(v)` shifted by half a turn.
    pub fn sector_of(&self, v: AlloVector) -> u32 {
        let lower = v.dy < 0.0 || (v.dy == 0.0 && v.dx < 0.0);
        if self.antipodal() && lower {
            return self.sector_of(-v) + self.sectors / 2;
        }
        let angle = v.angle();
        let last = if self.antipodal() {
            self.sectors / 2 - 1
        } else {
            self.sectors - 1
        };
        ((angle / self.sector_width()).floor() as u32).min(last)
    }

    /// Ring containing radius `r`. Radii beyond the outermost ring are
    /// clamped into it; callers enforce any range limit.
    pub fn ring_of(&self, r: f64) -> u32 {
        let last = self.rings - 1;
        if r < self.edges[1] {
            return 0;
        }
        let guess = ((r / self.r0).ln() / self.growth.ln()).floor();
        let mut k = if guess.is_finite() && guess > 0.0 {
            (guess as u32).min(last)
        } else {
            0
        };
        // fix up floating-point drift against the tabulated edges
        while k < last && r >= self.edges[k as usize + 1] {
            k += 1;
        }
        while k > 0 && r < self.edges[k as usize] {
            k -= 1;
        }
        k
    }

    /// Geometric mean of the nominal ring edges.
    pub fn center_radius(&self, ring: u32) -> f64 {
        (self.edges[ring as usize] * self.edges[ring as usize + 1]).sqrt()
    }

    /// Bin center. Antipodal sectors decode to exactly negated vectors.
    pub fn center(&self, sector: u32, ring: u32) -> AlloVector {
        let half = self.sectors / 2;
        if self.antipodal() && sector >= half {
            return -self.center(sector - half, ring);
        }
        let angle = (sector as f64 + 0.5) * self.sector_width();
        AlloVector::from_polar(self.center_radius(ring), angle)
    }

    /// Inner radius of the region the ring actually covers.
    pub fn inner_radius(&self, ring: u32) -> f64 {
        if ring == 0 {
            self.floor
        } else {
            self.edges[ring as usize]
        }
    }

    /// Outer radius of the region the ring actually covers.
    pub fn outer_radius(&self, ring: u32) -> f64 {
        if ring + 1 == self.rings && self.outer == OuterEdge::Open {
            f64::INFINITY
        } else {
            self.edges[ring as usize + 1]
        }
    }

    /// Nominal radial width `r0·g^k·(g-1)`.
    pub fn ring_width(&self, ring: u32) -> f64 {
        self.edges[ring as usize + 1] - self.edges[ring as usize]
    }

    /// Largest distance between the bin center and any point of the bin.
    ///
    /// The squared distance to the center is convex in radius and grows with
    /// angular offset, so the maximum sits on one of the four bin corners.
    pub fn half_width(&self, ring: u32) -> f64 {
        let outer = self.outer_radius(ring);
        if outer.is_infinite() {
            return f64::INFINITY;
        }
        let rc = self.center_radius(ring);
        let cos_half = (self.sector_width() / 2.0).cos();
        [self.inner_radius(ring), outer]
            .iter()
            .map(|&r| (r * r + rc * rc - 2.0 * r * rc * cos_half).max(0.0).sqrt())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ovc_like() -> LogPolarCode {
        LogPolarCode::new(24, 10, 0.25, 1.4, 0.0, OuterEdge::Closed)
    }

    #[test]
    fn ring_lookup_respects_tabulated_edges() {
        let c = ovc_like();
        for k in 1..c.rings() {
            assert_eq!(c.ring_of(c.edge(k)), k, "edge {k}");
            let below = c.edge(k) * (1.0 - 1e-15);
            assert_eq!(c.ring_of(below), k - 1, "below edge {k}");
        }
        assert_eq!(c.ring_of(1e-9), 0);
        assert_eq!(c.ring_of(c.max_radius()), c.rings() - 1);
    }

    #[test]
    fn sector_antipodal_fold() {
        let c = ovc_like();
        for i in 0..360 {
            let v = AlloVector::from_polar(1.0, (i as f64 + 0.3).to_radians());
            assert_eq!((c.sector_of(v) + 12) % 24, c.sector_of(-v));
        }
        assert_eq!(c.sector_of(AlloVector::new(1.0, 0.0)), 0);
        assert_eq!(c.sector_of(AlloVector::new(-1.0, 0.0)), 12);
        assert_eq!(c.sector_of(AlloVector::new(1.0, -1e-300)), 23);
    }

    #[test]
    fn half_width_bounds_bin_samples() {
        let c = ovc_like();
        for ring in 0..c.rings() {
            let hw = c.half_width(ring);
            let center = c.center(0, ring);
            for i in 0..=20 {
                for j in 0..=20 {
                    let r = c.inner_radius(ring)
                        + (c.outer_radius(ring) - c.inner_radius(ring)) * i as f64 / 20.0;
                    let a = c.sector_width() * j as f64 / 20.0;
                    let p = AlloVector::from_polar(r, a);
                    assert!(p.distance(&center) <= hw + 1e-12);
                }
            }
        }
    }
}
