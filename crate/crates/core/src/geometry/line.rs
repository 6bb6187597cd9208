use std::f64::consts::PI;

use crate::vec2::Vec2;

/// The line `L(phi, s) = { s*theta + t*theta_perp : t real }`.
///
/// `(phi, s)` and `(phi + pi, -s)` name the same line; [`Line::canonical`]
/// picks the representative with `phi` in `[0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub phi: f64,
    pub s: f64,
}

impl Line {
    pub fn new(phi: f64, s: f64) -> Self {
        Line { phi, s }
    }

    /// Line through two distinct points.
    pub fn through(a: Vec2, b: Vec2) -> Line {
        let d = b - a;
        let normal = Vec2::new(d.y, -d.x).normalized();
        Line::new(normal.angle(), normal.dot(a)).canonical()
    }

    /// Line with unit normal `normal` at signed offset `s`.
    pub fn with_normal(normal: Vec2, s: f64) -> Line {
        Line::new(normal.angle(), s).canonical()
    }

    pub fn theta(&self) -> Vec2 {
        Vec2::unit(self.phi)
    }

    pub fn theta_perp(&self) -> Vec2 {
        self.theta().perp()
    }

    /// Signed distance `p . theta - s`.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        p.dot(self.theta()) - self.s
    }

    /// Coordinate of `p` along the line direction.
    pub fn t_of(&self, p: Vec2) -> f64 {
        p.dot(self.theta_perp())
    }

    pub fn point_at(&self, t: f64) -> Vec2 {
        self.s * self.theta() + t * self.theta_perp()
    }

    /// Representative with `phi` in `[0, pi)`.
    pub fn canonical(self) -> Line {
        let mut phi = self.phi.rem_euclid(2.0 * PI);
        let mut s = self.s;
        // rem_euclid can round up to exactly 2 pi, so fold twice
        for _ in 0..2 {
            if phi >= PI {
                phi -= PI;
                s = -s;
            }
        }
        // fold -0.0 into +0.0 so printed and hashed lines agree
        Line { phi: phi + 0.0, s: s + 0.0 }
    }

    /// True if the lines agree within `dphi` and `ds`, modulo `(phi + pi, -s)`.
    pub fn approx_eq(&self, other: &Line, dphi: f64, ds: f64) -> bool {
        let a = self.canonical();
        let b = other.canonical();
        let direct = (a.phi - b.phi).abs();
        if direct < dphi && (a.s - b.s).abs() < ds {
            return true;
        }
        // near the phi = 0 / pi seam the representatives differ by pi
        let wrapped = PI - direct;
        wrapped < dphi && (a.s + b.s).abs() < ds
    }

    /// Line rotated about the origin by `beta`.
    pub fn rotated(&self, beta: f64) -> Line {
        Line::new(self.phi + beta, self.s).canonical()
    }
}
