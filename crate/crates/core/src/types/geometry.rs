use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vectors at or below this norm have no usable direction.
pub const ZERO_VECTOR_EPS: f64 = 1e-12;

/// A planar vector in meters (positions, offsets) or dimensionless (directions).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (other - self).norm()
    }

    pub fn rotate(self, phi: f64) -> Vec2 {
        let (s, c) = phi.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2::new(x, y)
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, k: f64) -> Vec2 {
        Vec2::new(self.x / k, self.y / k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl std::iter::Sum for Vec2 {
    fn sum<I: Iterator<Item = Vec2>>(iter: I) -> Vec2 {
        iter.fold(Vec2::ZERO, |acc, v| acc + v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("vector norm is at or below {ZERO_VECTOR_EPS}; no direction")]
pub struct ZeroVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("heading components are not a unit vector")]
pub struct NotUnit;

/// A direction of travel stored as a unit vector.
///
/// Averaging headings is done on the vectors, so no angle wraparound handling
/// is ever needed. [`Heading::angle`] derives the angle on demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Heading(Vec2);

/// Tolerance on the norm of a heading vector.
pub const UNIT_TOL: f64 = 1e-9;

impl Heading {
    pub const EAST: Heading = Heading(Vec2::new(1.0, 0.0));
    pub const NORTH: Heading = Heading(Vec2::new(0.0, 1.0));

    pub fn from_angle(theta: f64) -> Self {
        Heading(Vec2::from_angle(theta))
    }

    pub fn from_degrees(deg: f64) -> Self {
        Self::from_angle(deg.to_radians())
    }

    /// Accepts components that already form a unit vector, without touching
    /// their bits. Used by decoders that must reproduce values exactly.
    pub fn from_unit(x: f64, y: f64) -> Result<Self, NotUnit> {
        let v = Vec2::new(x, y);
        if v.is_finite() && (v.norm() - 1.0).abs() <= UNIT_TOL {
            Ok(Heading(v))
        } else {
            Err(NotUnit)
        }
    }

    pub fn vector(self) -> Vec2 {
        self.0
    }

    pub fn x(self) -> f64 {
        self.0.x
    }

    pub fn y(self) -> f64 {
        self.0.y
    }

    /// Angle in `(-pi, pi]`.
    pub fn angle(self) -> f64 {
        self.0.y.atan2(self.0.x)
    }

    /// Signed angle that rotates `self` onto `other`, in `[-pi, pi]`.
    pub fn angle_to(self, other: Heading) -> f64 {
        self.0.cross(other.0).atan2(self.0.dot(other.0))
    }

    pub fn rotate(self, phi: f64) -> Heading {
        normalize(self.0.rotate(phi)).unwrap_or(self)
    }
}

impl Default for Heading {
    fn default() -> Self {
        Heading::EAST
    }
}

impl TryFrom<[f64; 2]> for Heading {
    type Error = NotUnit;
    fn try_from([x, y]: [f64; 2]) -> Result<Self, NotUnit> {
        Heading::from_unit(x, y)
    }
}

impl From<Heading> for [f64; 2] {
    fn from(h: Heading) -> Self {
        h.0.into()
    }
}

/// Turns `v` into a heading, or reports that it has no direction.
pub fn normalize(v: Vec2) -> Result<Heading, ZeroVector> {
    let n = v.norm();
    if !(n > ZERO_VECTOR_EPS) || !n.is_finite() {
        return Err(ZeroVector);
    }
    let u = v / n;
    // hypot-based division can leave the norm a few ulps off, which is fine
    debug_assert!((u.norm() - 1.0).abs() <= UNIT_TOL);
    Ok(Heading(u))
}
