//! Exact tangency analysis of a line against the boundary of a union of
//! primitives.
//!
//! A boundary point `p` on `L(phi, s)` is a tangency when `theta` is a
//! singular direction of the characteristic function at `p`:
//!
//! * on a smooth arc, `theta` is parallel to the normal at `p`;
//! * on a straight edge, the whole edge lies on the line;
//! * at a corner, `+theta` or `-theta` lies in the closed cone spanned by the
//!   outward normals of the two incident boundary pieces.
//!
//! Each event carries `t = p . theta_perp`; the conormal covector of the
//! projected singularity is `a * (-t, 1)`. A line with two distinct `t`
//! values (or a whole edge) has a two-dimensional span of singular
//! directions.

use crate::geometry::line::Line;
use crate::geometry::shape::{Conic, Piece, Shape};
use crate::vec2::Vec2;

/// Numerical tolerances, all scaled to the field of view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Tangency is exact when the line is within this distance of tangent.
    pub tangency: f64,
    /// Near-tangencies up to this distance are reported as ambiguous.
    pub ambiguity: f64,
    /// Lines closer than this in `phi` (radians) ...
    pub dedup_phi: f64,
    /// ... and in `s` are the same line.
    pub dedup_s: f64,
}

impl Tolerances {
    pub fn for_fov(fov: f64) -> Self {
        Tolerances {
            tangency: 1e-9 * fov,
            ambiguity: 1e-6 * fov,
            dedup_phi: 1e-6,
            dedup_s: 1e-6 * fov,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::for_fov(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TangencyKind {
    SmoothArc,
    /// Line collinear with a straight edge covering `[t_min, t_max]`.
    EdgeSegment { t_min: f64, t_max: f64 },
    VertexFan,
}

impl TangencyKind {
    pub fn name(&self) -> &'static str {
        match self {
            TangencyKind::SmoothArc => "smooth-arc",
            TangencyKind::EdgeSegment { .. } => "edge-segment",
            TangencyKind::VertexFan => "vertex-fan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangencyEvent {
    pub point: Vec2,
    /// For edge segments, the lower end of the covered interval.
    pub t: f64,
    pub kind: TangencyKind,
    /// Near-tangent within the ambiguity band but not resolvable as exact.
    pub ambiguous: bool,
}

/// All tangency events of `line` on the boundary of the union of `shapes`.
///
/// Events at points strictly inside another shape of the union are dropped.
pub fn line_tangencies(shapes: &[&Shape], line: &Line, tol: &Tolerances) -> Vec<TangencyEvent> {
    let theta = line.theta();
    let mut out = Vec::new();
    for (k, shape) in shapes.iter().enumerate() {
        for piece in shape.pieces() {
            let event = match piece {
                Piece::Conic(conic) => conic_event(&conic, line, tol),
                Piece::Segment { a, b, .. } => {
                    let (da, db) = (line.signed_distance(a).abs(), line.signed_distance(b).abs());
                    let worst = da.max(db);
                    if worst > tol.ambiguity {
                        None
                    } else {
                        let (ta, tb) = (line.t_of(a), line.t_of(b));
                        let (t_min, t_max) = (ta.min(tb), ta.max(tb));
                        Some(TangencyEvent {
                            point: (a + b) * 0.5,
                            t: t_min,
                            kind: TangencyKind::EdgeSegment { t_min, t_max },
                            ambiguous: worst > tol.tangency,
                        })
                    }
                }
                Piece::Corner { at, n1, n2 } => {
                    let d = line.signed_distance(at).abs();
                    if d > tol.ambiguity || !(in_fan(theta, n1, n2) || in_fan(-theta, n1, n2)) {
                        None
                    } else {
                        Some(TangencyEvent {
                            point: at,
                            t: line.t_of(at),
                            kind: TangencyKind::VertexFan,
                            ambiguous: d > tol.tangency,
                        })
                    }
                }
            };
            if let Some(ev) = event {
                if !covered_by_others(&ev, line, shapes, k, tol) {
                    out.push(ev);
                }
            }
        }
    }
    out
}

fn conic_event(conic: &Conic, line: &Line, tol: &Tolerances) -> Option<TangencyEvent> {
    let theta = line.theta();
    let d = line.s - conic.center.dot(theta);
    let h = conic.support(line.phi);
    let gap = (d.abs() - h).abs();
    if gap > tol.ambiguity || d == 0.0 {
        return None;
    }
    let u = if d > 0.0 { theta } else { -theta };
    let p = conic.point_with_normal(u);
    let angle_tol = tol.tangency / conic.a.max(conic.b);
    if !conic.on_arc(p, angle_tol) {
        return None;
    }
    Some(TangencyEvent {
        point: p,
        t: line.t_of(p),
        kind: TangencyKind::SmoothArc,
        ambiguous: gap > tol.tangency,
    })
}

/// `u` lies in the smaller closed cone spanned by `n1` and `n2`.
pub(crate) fn in_fan(u: Vec2, n1: Vec2, n2: Vec2) -> bool {
    const EPS: f64 = 1e-9;
    let (n1, n2) = if n1.cross(n2) >= 0.0 { (n1, n2) } else { (n2, n1) };
    if n1.cross(n2).abs() < EPS && n1.dot(n2) > 0.0 {
        return u.cross(n1).abs() < EPS && u.dot(n1) > 0.0;
    }
    n1.cross(u) >= -EPS && u.cross(n2) >= -EPS
}

fn covered_by_others(ev: &TangencyEvent, line: &Line, shapes: &[&Shape], own: usize, tol: &Tolerances) -> bool {
    let interior = |p: Vec2| {
        shapes
            .iter()
            .enumerate()
            .any(|(k, s)| k != own && s.depth(p) > tol.tangency)
    };
    match ev.kind {
        TangencyKind::EdgeSegment { t_min, t_max } => (0..=8)
            .map(|i| line.point_at(t_min + (t_max - t_min) * i as f64 / 8.0))
            .all(interior),
        _ => interior(ev.point),
    }
}

/// Dimension of the span of singular directions `{(-t, 1)}` at the line:
/// 0 without events, 2 with an edge or two distinct `t`, else 1.
/// Ambiguous events are ignored.
pub fn span_dim(events: &[TangencyEvent], tol: &Tolerances) -> u8 {
    let exact: Vec<_> = events.iter().filter(|e| !e.ambiguous).collect();
    if exact.is_empty() {
        return 0;
    }
    if exact.iter().any(|e| {
        matches!(e.kind, TangencyKind::EdgeSegment { t_min, t_max } if t_max - t_min > tol.dedup_s)
    }) {
        return 2;
    }
    let t0 = exact[0].t;
    if exact.iter().any(|e| (e.t - t0).abs() > tol.dedup_s) {
        2
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn unit_disk_tangent_line() {
        let d = Shape::disk(0.0, 0.0, 1.0);
        let ev = line_tangencies(&[&d], &Line::new(0.0, 1.0), &tol());
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].kind, TangencyKind::SmoothArc);
        assert!((ev[0].point - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        assert!(ev[0].t.abs() < 1e-15);
        assert!(!ev[0].ambiguous);
        assert_eq!(span_dim(&ev, &tol()), 1);
    }

    #[test]
    fn secant_and_missing_lines_have_no_events() {
        let d = Shape::disk(0.0, 0.0, 1.0);
        assert!(line_tangencies(&[&d], &Line::new(0.0, 0.5), &tol()).is_empty());
        assert!(line_tangencies(&[&d], &Line::new(0.0, 1.5), &tol()).is_empty());
    }

    #[test]
    fn near_tangent_line_is_flagged() {
        let d = Shape::disk(0.0, 0.0, 1.0);
        let ev = line_tangencies(&[&d], &Line::new(0.0, 1.0 + 1e-7), &tol());
        assert_eq!(ev.len(), 1);
        assert!(ev[0].ambiguous);
        assert_eq!(span_dim(&ev, &tol()), 0);
    }

    #[test]
    fn quarter_disk_x_axis() {
        let q = Shape::sector(0.0, 0.0, 1.0, 0.0, PI / 2.0);
        let ev = line_tangencies(&[&q], &Line::new(PI / 2.0, 0.0), &tol());
        let edge = ev
            .iter()
            .find_map(|e| match e.kind {
                TangencyKind::EdgeSegment { t_min, t_max } => Some((t_min, t_max)),
                _ => None,
            })
            .expect("edge event");
        assert!((edge.1 - edge.0 - 1.0).abs() < 1e-12);
        assert!(edge.0.abs() < 1e-12 || edge.1.abs() < 1e-12);
        let vertices = ev.iter().filter(|e| e.kind == TangencyKind::VertexFan).count();
        assert_eq!(vertices, 2);
        assert_eq!(span_dim(&ev, &tol()), 2);
    }

    #[test]
    fn quarter_disk_chord_through_corners_is_not_tangent() {
        let q = Shape::sector(0.0, 0.0, 1.0, 0.0, PI / 2.0);
        let l = Line::through(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
        assert!(line_tangencies(&[&q], &l, &tol()).is_empty());
        // supporting line through the centre corner only
        let l = Line::through(Vec2::new(0.0, 0.0), Vec2::new(-1.0, 1.0));
        let ev = line_tangencies(&[&q], &l, &tol());
        assert_eq!(ev.len(), 1);
        assert_eq!(span_dim(&ev, &tol()), 1);
    }

    #[test]
    fn arc_endpoint_tangent_is_single_point() {
        let q = Shape::sector(0.0, 0.0, 1.0, 0.0, PI / 2.0);
        let ev = line_tangencies(&[&q], &Line::new(0.0, 1.0), &tol());
        assert!(!ev.is_empty());
        assert_eq!(span_dim(&ev, &tol()), 1);
        // tangent outside the arc's range
        assert!(line_tangencies(&[&q], &Line::new(PI, 1.0), &tol()).is_empty());
    }

    #[test]
    fn interior_points_of_union_are_not_tangencies() {
        let a = Shape::disk(0.0, 0.0, 1.0);
        let b = Shape::disk(0.5, 0.0, 1.0);
        // x = 1 touches disk a at (1,0), which is inside b
        assert!(line_tangencies(&[&a, &b], &Line::new(0.0, 1.0), &tol()).is_empty());
        assert_eq!(line_tangencies(&[&a, &b], &Line::new(0.0, 1.5), &tol()).len(), 1);
    }

    #[test]
    fn ellipse_tangency_point_lies_on_line() {
        let e = Shape::ellipse(0.1, 0.2, 0.5, 0.2, 0.7);
        let Piece::Conic(c) = e.pieces()[0] else { unreachable!() };
        for k in 0..12 {
            let phi = k as f64 * 0.5;
            let s = c.center.dot(Vec2::unit(phi)) - c.support(phi);
            let line = Line::new(phi, s);
            let ev = line_tangencies(&[&e], &line, &tol());
            assert_eq!(ev.len(), 1, "phi = {phi}");
            assert!(line.signed_distance(ev[0].point).abs() < 1e-12);
        }
    }

    #[test]
    fn fan_membership() {
        let n1 = Vec2::new(0.0, -1.0);
        let n2 = Vec2::new(1.0, 0.0);
        assert!(in_fan(Vec2::unit(-PI / 4.0), n1, n2));
        assert!(in_fan(n1, n2, n1));
        assert!(!in_fan(Vec2::unit(PI / 4.0), n1, n2));
        assert!(!in_fan(Vec2::unit(3.0 * PI / 4.0), n1, n2));
    }
}
