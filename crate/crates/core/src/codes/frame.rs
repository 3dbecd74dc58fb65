//! Reference frames: allocentric and egocentric vectors, world points and
//! the head-direction code that rotates between them.

use std::f64::consts::TAU;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Environment-centric displacement in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AlloVector {
    pub dx: f64,
    pub dy: f64,
}

/// Viewer-centric displacement in meters. `+dx` is straight ahead, `+dy` is to the left.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EgoVector {
    pub dx: f64,
    pub dy: f64,
}

/// A position in the world frame, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl AlloVector {
    pub const ZERO: AlloVector = AlloVector { dx: 0.0, dy: 0.0 };

    pub const fn new(dx: f64, dy: f64) -> Self {
        Self { dx, dy }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(radius * c, radius * s)
    }

    pub fn norm(&self) -> f64 {
        self.dx.hypot(self.dy)
    }

    /// Direction in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        wrap_angle(self.dy.atan2(self.dx))
    }

    pub fn is_finite(&self) -> bool {
        self.dx.is_finite() && self.dy.is_finite()
    }

    pub fn distance(&self, other: &AlloVector) -> f64 {
        (*self - *other).norm()
    }
}

impl EgoVector {
    pub const ZERO: EgoVector = EgoVector { dx: 0.0, dy: 0.0 };

    pub const fn new(dx: f64, dy: f64) -> Self {
        Self { dx, dy }
    }

    pub fn norm(&self) -> f64 {
        self.dx.hypot(self.dy)
    }

    pub fn is_finite(&self) -> bool {
        self.dx.is_finite() && self.dy.is_finite()
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }
}

impl Add for AlloVector {
    type Output = AlloVector;
    fn add(self, rhs: AlloVector) -> AlloVector {
        AlloVector::new(self.dx + rhs.dx, self.dy + rhs.dy)
    }
}

impl AddAssign for AlloVector {
    fn add_assign(&mut self, rhs: AlloVector) {
        self.dx += rhs.dx;
        self.dy += rhs.dy;
    }
}

impl Sub for AlloVector {
    type Output = AlloVector;
    fn sub(self, rhs: AlloVector) -> AlloVector {
        AlloVector::new(self.dx - rhs.dx, self.dy - rhs.dy)
    }
}

impl Neg for AlloVector {
    type Output = AlloVector;
    fn neg(self) -> AlloVector {
        AlloVector::new(-self.dx, -self.dy)
    }
}

impl Mul<f64> for AlloVector {
    type Output = AlloVector;
    fn mul(self, k: f64) -> AlloVector {
        AlloVector::new(self.dx * k, self.dy * k)
    }
}

impl Sub for Point {
    type Output = AlloVector;
    fn sub(self, rhs: Point) -> AlloVector {
        AlloVector::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Add<AlloVector> for Point {
    type Output = Point;
    fn add(self, rhs: AlloVector) -> Point {
        Point::new(self.x + rhs.dx, self.y + rhs.dy)
    }
}

/// Head-direction population: a continuous compass angle plus the index of
/// the single active head-direction cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Heading {
    angle: f64,
    bin: u32,
}

impl Heading {
    pub fn new(angle: f64, bins: u32) -> Self {
        let angle = wrap_angle(angle);
        let width = TAU / bins as f64;
        let bin = ((angle / width).floor() as u32).min(bins - 1);
        Self { angle, bin }
    }

    /// Heading after turning counterclockwise by `turn` radians.
    pub fn turned(&self, turn: f64, bins: u32) -> Self {
        Self::new(self.angle + turn, bins)
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn bin(&self) -> u32 {
        self.bin
    }
}

/// Rotates an egocentric vector counterclockwise by the heading.
pub fn ego_to_allo(v: EgoVector, heading: &Heading) -> AlloVector {
    let (s, c) = heading.angle().sin_cos();
    AlloVector::new(c * v.dx - s * v.dy, s * v.dx + c * v.dy)
}

/// Inverse of [`ego_to_allo`].
pub fn allo_to_ego(v: AlloVector, heading: &Heading) -> EgoVector {
    let (s, c) = heading.angle().sin_cos();
    EgoVector::new(c * v.dx + s * v.dy, -s * v.dx + c * v.dy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn hd(angle: f64) -> Heading {
        Heading::new(angle, 72)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn identity_and_quarter_turn() {
        let v = ego_to_allo(EgoVector::new(1.0, 0.0), &hd(0.0));
        assert_eq!(v, AlloVector::new(1.0, 0.0));
        let v = ego_to_allo(EgoVector::new(1.0, 0.0), &hd(FRAC_PI_2));
        assert!(close(v.dx, 0.0) && close(v.dy, 1.0));
    }

    #[test]
    fn rotation_matches_trig_oracle() {
        // independent oracle: rotate via polar form
        let (ex, ey, th) = (0.6_f64, 0.8_f64, 0.7_f64);
        let r = ex.hypot(ey);
        let phi = ey.atan2(ex) + th;
        let v = ego_to_allo(EgoVector::new(ex, ey), &hd(th));
        assert!((v.dx - r * phi.cos()).abs() < 1e-12);
        assert!((v.dy - r * phi.sin()).abs() < 1e-12);
    }

    #[test]
    fn inverse_rotations() {
        let e = allo_to_ego(AlloVector::new(0.0, 1.0), &hd(FRAC_PI_2));
        assert!(close(e.dx, 1.0) && close(e.dy, 0.0));
        let e = allo_to_ego(AlloVector::new(1.0, 1.0), &hd(PI));
        assert!(close(e.dx, -1.0) && close(e.dy, -1.0));
    }

    #[test]
    fn heading_bins_are_half_open_and_wrap() {
        assert_eq!(hd(0.0).bin(), 0);
        assert_eq!(hd(TAU).bin(), 0);
        assert_eq!(hd(TAU).angle(), 0.0);
        assert_eq!(hd(-1e-18).bin(), 0);
        assert_eq!(hd(5f64.to_radians()).bin(), 1);
        assert_eq!(hd(TAU - 1e-9).bin(), 71);
        assert_eq!(hd(-FRAC_PI_2).bin(), 54);
    }

    #[test]
    fn turning_full_circle_restores_heading() {
        let h = hd(1.0).turned(TAU, 72);
        assert!((h.angle() - 1.0).abs() < 1e-12);
        assert_eq!(h.bin(), hd(1.0).bin());
    }
}
