use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::line::Line;
use crate::vec2::Vec2;

/// Closed planar shape. All angles are in radians.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Disk {
        center: Vec2,
        radius: f64,
    },
    /// Ellipse with semi-axes `a` (along `angle`) and `b`.
    Ellipse {
        center: Vec2,
        a: f64,
        b: f64,
        angle: f64,
    },
    /// Convex polygon, vertices counterclockwise.
    Polygon { vertices: Vec<Vec2> },
    /// Disk sector `{ center + rho*(cos g, sin g) : rho <= radius, g in [start, end] }`.
    Sector {
        center: Vec2,
        radius: f64,
        start: f64,
        end: f64,
    },
}

/// An attenuation primitive: a shape with a constant value inside.
#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub shape: Shape,
    pub value: f64,
}

impl Primitive {
    pub fn new(shape: Shape, value: f64) -> Self {
        Primitive { shape, value }
    }
}

/// Ellipse or circle, optionally restricted to a circular arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    pub center: Vec2,
    pub a: f64,
    pub b: f64,
    pub angle: f64,
    /// `(start, extent)` of the polar-angle range for circular arcs.
    pub arc: Option<(f64, f64)>,
}

/// One smooth or singular piece of a shape boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    Conic(Conic),
    /// Straight edge with its outward unit normal.
    Segment { a: Vec2, b: Vec2, normal: Vec2 },
    /// Corner with the outward normals of its two incident pieces.
    Corner { at: Vec2, n1: Vec2, n2: Vec2 },
}

/// Polar angle `g` lies in `[start, start + extent]` within `tol` radians.
pub(crate) fn angle_in_range(g: f64, start: f64, extent: f64, tol: f64) -> bool {
    let rel = (g - start).rem_euclid(TAU);
    rel <= extent + tol || rel >= TAU - tol
}

impl Conic {
    pub fn is_circle(&self) -> bool {
        self.a == self.b
    }

    /// Support half-width `h(phi)`: tangent lines with normal angle `phi`
    /// sit at `s = center . theta +/- h(phi)`.
    pub fn support(&self, phi: f64) -> f64 {
        let (sb, cb) = (phi - self.angle).sin_cos();
        (self.a * self.a * cb * cb + self.b * self.b * sb * sb).sqrt()
    }

    /// Boundary point whose outward normal is `u` (unit).
    pub fn point_with_normal(&self, u: Vec2) -> Vec2 {
        let beta = u.angle() - self.angle;
        let (sb, cb) = beta.sin_cos();
        let h = (self.a * self.a * cb * cb + self.b * self.b * sb * sb).sqrt();
        let local = Vec2::new(self.a * self.a * cb / h, self.b * self.b * sb / h);
        self.center + local.rotated(self.angle)
    }

    /// Maps a point into the frame where the conic is the unit circle.
    pub(crate) fn to_unit(&self, p: Vec2) -> Vec2 {
        let q = (p - self.center).rotated(-self.angle);
        Vec2::new(q.x / self.a, q.y / self.b)
    }

    pub(crate) fn from_unit(&self, q: Vec2) -> Vec2 {
        self.center + Vec2::new(q.x * self.a, q.y * self.b).rotated(self.angle)
    }

    /// Whether a boundary point lies on the arc (always true for full conics).
    pub fn on_arc(&self, p: Vec2, tol: f64) -> bool {
        match self.arc {
            None => true,
            Some((start, extent)) => angle_in_range((p - self.center).angle(), start, extent, tol),
        }
    }
}

impl Shape {
    pub fn disk(cx: f64, cy: f64, radius: f64) -> Shape {
        Shape::Disk {
            center: Vec2::new(cx, cy),
            radius,
        }
    }

    pub fn ellipse(cx: f64, cy: f64, a: f64, b: f64, angle: f64) -> Shape {
        Shape::Ellipse {
            center: Vec2::new(cx, cy),
            a,
            b,
            angle,
        }
    }

    pub fn polygon(vertices: &[(f64, f64)]) -> Shape {
        Shape::Polygon {
            vertices: vertices.iter().map(|&(x, y)| Vec2::new(x, y)).collect(),
        }
    }

    pub fn sector(cx: f64, cy: f64, radius: f64, start: f64, end: f64) -> Shape {
        Shape::Sector {
            center: Vec2::new(cx, cy),
            radius,
            start,
            end,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Shape::Disk { .. } => "disk",
            Shape::Ellipse { .. } => "ellipse",
            Shape::Polygon { .. } => "polygon",
            Shape::Sector { .. } => "sector",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGeometry(msg));
        match self {
            Shape::Disk { center, radius } => {
                if !center.is_finite() || !(radius.is_finite() && *radius > 0.0) {
                    return bad(format!("disk needs a finite center and radius > 0, got r = {radius}"));
                }
            }
            Shape::Ellipse { center, a, b, angle } => {
                if !center.is_finite() || !angle.is_finite() || !(a.is_finite() && *a > 0.0 && b.is_finite() && *b > 0.0) {
                    return bad(format!("ellipse needs semi-axes > 0, got a = {a}, b = {b}"));
                }
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                if n < 3 {
                    return bad(format!("polygon needs at least 3 vertices, got {n}"));
                }
                if vertices.iter().any(|v| !v.is_finite()) {
                    return bad("polygon vertex is not finite".into());
                }
                let mut turning = 0.0;
                for i in 0..n {
                    let e0 = vertices[(i + 1) % n] - vertices[i];
                    let e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
                    if e0.norm() == 0.0 {
                        return bad(format!("polygon has a repeated vertex at index {i}"));
                    }
                    if e0.cross(e1) <= 0.0 {
                        return bad(format!(
                            "polygon must be strictly convex and counterclockwise (turn at vertex {} is not a left turn)",
                            (i + 1) % n
                        ));
                    }
                    turning += e0.cross(e1).atan2(e0.dot(e1));
                }
                if (turning - TAU).abs() > 1e-6 {
                    return bad("polygon is not simple (winds more than once)".into());
                }
            }
            Shape::Sector { center, radius, start, end } => {
                if !center.is_finite() || !(radius.is_finite() && *radius > 0.0) {
                    return bad(format!("sector needs radius > 0, got {radius}"));
                }
                let extent = end - start;
                if !(extent > 0.0 && extent < TAU) {
                    return bad(format!("sector angular extent {extent} must lie in (0, 2*pi)"));
                }
            }
        }
        Ok(())
    }

    /// Closed-set membership (boundary counts as inside).
    pub fn contains(&self, p: Vec2) -> bool {
        self.depth(p) >= -1e-12
    }

    /// Approximate signed depth of `p`: positive inside, distance-like near
    /// the boundary, negative outside.
    pub fn depth(&self, p: Vec2) -> f64 {
        match self {
            Shape::Disk { center, radius } => radius - (p - *center).norm(),
            Shape::Ellipse { center, a, b, angle } => {
                let q = (p - *center).rotated(-angle);
                let f = (q.x / a).powi(2) + (q.y / b).powi(2);
                let grad = Vec2::new(2.0 * q.x / (a * a), 2.0 * q.y / (b * b)).norm();
                if grad == 0.0 {
                    a.min(*b)
                } else {
                    (1.0 - f) / grad
                }
            }
            Shape::Polygon { vertices } => polygon_edges(vertices)
                .map(|(a, _, n)| n.dot(a) - n.dot(p))
                .fold(f64::INFINITY, f64::min),
            Shape::Sector { center, radius, start, end } => {
                let d = p - *center;
                let radial = radius - d.norm();
                let u0 = Vec2::unit(*start);
                let u1 = Vec2::unit(*end);
                let w0 = u0.cross(d);
                let w1 = d.cross(u1);
                let wedge = if end - start <= PI { w0.min(w1) } else { w0.max(w1) };
                radial.min(wedge)
            }
        }
    }

    /// Length of `line` inside the shape.
    pub fn chord_length(&self, line: &Line) -> f64 {
        let theta = line.theta();
        match self {
            Shape::Disk { center, radius } => {
                let d = line.s - center.dot(theta);
                let q = radius * radius - d * d;
                if q > 0.0 {
                    2.0 * q.sqrt()
                } else {
                    0.0
                }
            }
            Shape::Ellipse { center, a, b, angle } => {
                let (sb, cb) = (line.phi - angle).sin_cos();
                let sigma2 = a * a * cb * cb + b * b * sb * sb;
                let d = line.s - center.dot(theta);
                let q = sigma2 - d * d;
                if q > 0.0 {
                    2.0 * a * b * q.sqrt() / sigma2
                } else {
                    0.0
                }
            }
            Shape::Polygon { vertices } => {
                let mut iv = (f64::NEG_INFINITY, f64::INFINITY);
                for (a, _, n) in polygon_edges(vertices) {
                    // n . p(t) <= n . a
                    iv = clip(iv, n.dot(line.theta_perp()), n.dot(a) - line.s * n.dot(theta));
                }
                (iv.1 - iv.0).max(0.0)
            }
            Shape::Sector { center, radius, start, end } => {
                let d = line.s - center.dot(theta);
                let q = radius * radius - d * d;
                if q <= 0.0 {
                    return 0.0;
                }
                let tc = line.t_of(*center);
                let disk = (tc - q.sqrt(), tc + q.sqrt());
                let extent = end - start;
                if extent <= PI {
                    let iv = wedge_interval(line, *center, *start, *end, disk);
                    (iv.1 - iv.0).max(0.0)
                } else {
                    let iv = wedge_interval(line, *center, *end, start + TAU, disk);
                    (disk.1 - disk.0) - (iv.1 - iv.0).max(0.0)
                }
            }
        }
    }

    /// Maximum distance from the origin to any point of the shape.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            Shape::Disk { center, radius } => center.norm() + radius,
            Shape::Ellipse { center, a, b, .. } => center.norm() + a.max(*b),
            Shape::Polygon { vertices } => vertices.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Shape::Sector { center, radius, .. } => center.norm() + radius,
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        match self {
            Shape::Disk { center, radius } => (
                *center - Vec2::new(*radius, *radius),
                *center + Vec2::new(*radius, *radius),
            ),
            Shape::Ellipse { center, a, b, angle } => {
                let (s, c) = angle.sin_cos();
                let wx = (a * a * c * c + b * b * s * s).sqrt();
                let wy = (a * a * s * s + b * b * c * c).sqrt();
                (*center - Vec2::new(wx, wy), *center + Vec2::new(wx, wy))
            }
            Shape::Polygon { vertices } => bbox_of(vertices.iter().copied()),
            Shape::Sector { center, radius, start, end } => {
                let extent = end - start;
                let mut pts = vec![
                    *center,
                    *center + *radius * Vec2::unit(*start),
                    *center + *radius * Vec2::unit(*end),
                ];
                for k in 0..4 {
                    let g = k as f64 * PI / 2.0;
                    if angle_in_range(g, *start, extent, 0.0) {
                        pts.push(*center + *radius * Vec2::unit(g));
                    }
                }
                bbox_of(pts.into_iter())
            }
        }
    }

    /// Shape rotated about the origin by `beta`.
    pub fn rotated(&self, beta: f64) -> Shape {
        match self {
            Shape::Disk { center, radius } => Shape::Disk {
                center: center.rotated(beta),
                radius: *radius,
            },
            Shape::Ellipse { center, a, b, angle } => Shape::Ellipse {
                center: center.rotated(beta),
                a: *a,
                b: *b,
                angle: angle + beta,
            },
            Shape::Polygon { vertices } => Shape::Polygon {
                vertices: vertices.iter().map(|v| v.rotated(beta)).collect(),
            },
            Shape::Sector { center, radius, start, end } => Shape::Sector {
                center: center.rotated(beta),
                radius: *radius,
                start: start + beta,
                end: end + beta,
            },
        }
    }

    /// Shape translated by `offset`.
    pub fn translated(&self, offset: Vec2) -> Shape {
        match self {
            Shape::Disk { center, radius } => Shape::Disk {
                center: *center + offset,
                radius: *radius,
            },
            Shape::Ellipse { center, a, b, angle } => Shape::Ellipse {
                center: *center + offset,
                a: *a,
                b: *b,
                angle: *angle,
            },
            Shape::Polygon { vertices } => Shape::Polygon {
                vertices: vertices.iter().map(|v| *v + offset).collect(),
            },
            Shape::Sector { center, radius, start, end } => Shape::Sector {
                center: *center + offset,
                radius: *radius,
                start: *start,
                end: *end,
            },
        }
    }

    /// Decomposition of the boundary into smooth pieces and corners.
    pub fn pieces(&self) -> Vec<Piece> {
        match self {
            Shape::Disk { center, radius } => vec![Piece::Conic(Conic {
                center: *center,
                a: *radius,
                b: *radius,
                angle: 0.0,
                arc: None,
            })],
            Shape::Ellipse { center, a, b, angle } => vec![Piece::Conic(Conic {
                center: *center,
                a: *a,
                b: *b,
                angle: *angle,
                arc: None,
            })],
            Shape::Polygon { vertices } => {
                let edges: Vec<_> = polygon_edges(vertices).collect();
                let n = edges.len();
                let mut out: Vec<Piece> = edges
                    .iter()
                    .map(|&(a, b, normal)| Piece::Segment { a, b, normal })
                    .collect();
                for i in 0..n {
                    let (_, b, n1) = edges[i];
                    let (_, _, n2) = edges[(i + 1) % n];
                    out.push(Piece::Corner { at: b, n1, n2 });
                }
                out
            }
            Shape::Sector { center, radius, start, end } => {
                let a0 = *center + *radius * Vec2::unit(*start);
                let a1 = *center + *radius * Vec2::unit(*end);
                let n_start_edge = Vec2::unit(start - PI / 2.0);
                let n_end_edge = Vec2::unit(end + PI / 2.0);
                let mut out = vec![
                    Piece::Conic(Conic {
                        center: *center,
                        a: *radius,
                        b: *radius,
                        angle: 0.0,
                        arc: Some((*start, end - start)),
                    }),
                    Piece::Segment {
                        a: *center,
                        b: a0,
                        normal: n_start_edge,
                    },
                    Piece::Segment {
                        a: a1,
                        b: *center,
                        normal: n_end_edge,
                    },
                    Piece::Corner {
                        at: a0,
                        n1: n_start_edge,
                        n2: Vec2::unit(*start),
                    },
                    Piece::Corner {
                        at: a1,
                        n1: Vec2::unit(*end),
                        n2: n_end_edge,
                    },
                ];
                // a straight angle at the centre is not a corner
                if ((end - start) - PI).abs() > 1e-12 {
                    out.push(Piece::Corner {
                        at: *center,
                        n1: n_end_edge,
                        n2: n_start_edge,
                    });
                }
                out
            }
        }
    }
}

/// `(start, end, outward normal)` for each edge of a counterclockwise polygon.
fn polygon_edges(vertices: &[Vec2]) -> impl Iterator<Item = (Vec2, Vec2, Vec2)> + '_ {
    let n = vertices.len();
    (0..n).map(move |i| {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let e = b - a;
        (a, b, Vec2::new(e.y, -e.x).normalized())
    })
}

/// Intersects `iv` with `{ t : k * t <= rhs }`.
fn clip(iv: (f64, f64), k: f64, rhs: f64) -> (f64, f64) {
    if k > 0.0 {
        (iv.0, iv.1.min(rhs / k))
    } else if k < 0.0 {
        (iv.0.max(rhs / k), iv.1)
    } else if rhs < 0.0 {
        (0.0, 0.0)
    } else {
        iv
    }
}

/// Parameter interval of `line` inside the convex wedge from angle `a0`
/// counterclockwise to `a1` (extent at most pi), intersected with `iv`.
fn wedge_interval(line: &Line, apex: Vec2, a0: f64, a1: f64, iv: (f64, f64)) -> (f64, f64) {
    let u0 = Vec2::unit(a0);
    let u1 = Vec2::unit(a1);
    let base = line.s * line.theta() - apex;
    let dir = line.theta_perp();
    // u0 x (p - apex) >= 0  and  (p - apex) x u1 >= 0
    let iv = clip(iv, -u0.cross(dir), u0.cross(base));
    clip(iv, -dir.cross(u1), base.cross(u1))
}

fn bbox_of(mut pts: impl Iterator<Item = Vec2>) -> (Vec2, Vec2) {
    let first = pts.next().unwrap_or(Vec2::ZERO);
    pts.fold((first, first), |(lo, hi), p| {
        (
            Vec2::new(lo.x.min(p.x), lo.y.min(p.y)),
            Vec2::new(hi.x.max(p.x), hi.y.max(p.y)),
        )
    })
}
