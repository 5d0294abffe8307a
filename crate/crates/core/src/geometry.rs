//! Small planar geometry helpers shared by the mesh and discretization code.

use core::ops::{Add, Mul, Neg, Sub};

/// A point or vector in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    /// Rotation by -pi/2: the tangent paired with a unit normal.
    pub fn rotated_cw(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    pub fn scaled(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        self.scaled(s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Signed area of the triangle `(a, b, c)`; positive for counterclockwise
/// vertex order.
pub fn signed_area(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

/// Midpoint of the segment `(a, b)`.
pub fn midpoint(a: Vec2, b: Vec2) -> Vec2 {
    Vec2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
}

/// Gradients of the three barycentric coordinates of the triangle
/// `(a, b, c)` with area `area`. Entry `i` is the gradient of the
/// coordinate that equals 1 at vertex `i`.
pub fn barycentric_gradients(a: Vec2, b: Vec2, c: Vec2, area: f64) -> [Vec2; 3] {
    let s = 1.0 / (2.0 * area);
    [
        Vec2::new(b.y - c.y, c.x - b.x).scaled(s),
        Vec2::new(c.y - a.y, a.x - c.x).scaled(s),
        Vec2::new(a.y - b.y, b.x - a.x).scaled(s),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_area_orientation() {
        let a = Vec2::new(0.0, 0.0);
        let b = Vec2::new(1.0, 0.0);
        let c = Vec2::new(0.0, 1.0);
        assert_eq!(signed_area(a, b, c), 0.5);
        assert_eq!(signed_area(a, c, b), -0.5);
    }

    #[test]
    fn barycentric_gradients_sum_to_zero() {
        let a = Vec2::new(0.2, -0.1);
        let b = Vec2::new(1.3, 0.4);
        let c = Vec2::new(0.5, 1.7);
        let area = signed_area(a, b, c);
        let g = barycentric_gradients(a, b, c, area);
        let sum = g[0] + g[1] + g[2];
        assert!(sum.norm() < 1e-14);
        // The coordinate of vertex 0 drops from 1 to 0 along a->b and a->c.
        assert!((g[0].dot(b - a) + 1.0).abs() < 1e-12);
        assert!((g[0].dot(c - a) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotated_cw_is_tangent_convention() {
        let n = Vec2::new(0.0, 1.0);
        let t = n.rotated_cw();
        assert_eq!(t, Vec2::new(1.0, 0.0));
    }
}
