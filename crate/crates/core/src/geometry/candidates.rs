//! Enumeration of lines along which a union of primitives has tangency
//! events at two or more distinct boundary points.
//!
//! Candidate lines are generated exactly from the boundary pieces, then each
//! is checked with [`line_tangencies`] against the whole union:
//!
//! * supporting line of every straight edge;
//! * common tangents of every pair of conics (closed form for two circles,
//!   bisection on the normal angle otherwise);
//! * the line through every pair of corners;
//! * tangents from every corner to every conic.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::line::Line;
use crate::geometry::phantom::MetalRegion;
use crate::geometry::shape::{Conic, Piece, Shape};
use crate::geometry::tangency::{line_tangencies, span_dim, Tolerances, TangencyEvent};
use crate::vec2::Vec2;

/// What produces the singularity behind a streak line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreakSource {
    Geometry,
    Scatter,
    NoiseSpike,
}

impl StreakSource {
    pub fn name(&self) -> &'static str {
        match self {
            StreakSource::Geometry => "geometry",
            StreakSource::Scatter => "scatter",
            StreakSource::NoiseSpike => "noise-spike",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "geometry" => Some(StreakSource::Geometry),
            "scatter" => Some(StreakSource::Scatter),
            "noise-spike" => Some(StreakSource::NoiseSpike),
            _ => None,
        }
    }
}

/// A line `L(phi, s)` with its tangency evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct StreakLine {
    pub line: Line,
    pub tangencies: Vec<TangencyEvent>,
    pub span_dim: u8,
    pub source: StreakSource,
}

impl StreakLine {
    /// A line named directly, without tangency evidence (noise spikes).
    pub fn bare(line: Line, source: StreakSource) -> Self {
        StreakLine {
            line,
            tangencies: Vec::new(),
            span_dim: 2,
            source,
        }
    }
}

/// Result of candidate enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub lines: Vec<StreakLine>,
    /// Generated lines rejected by the tangency check: they cross the
    /// interior of the union, or touch it at fewer than two points.
    pub rejected: usize,
}

/// Streak candidates for the union of all metal regions.
pub fn enumerate_streak_candidates(metals: &[MetalRegion], tol: &Tolerances) -> Result<CandidateSet> {
    if metals.is_empty() {
        return Err(Error::InvalidInput("no metal regions to enumerate".into()));
    }
    let shapes: Vec<&Shape> = metals.iter().flat_map(|m| m.shapes()).collect();
    if shapes.is_empty() {
        return Err(Error::InvalidInput("metal regions have no primitives".into()));
    }
    Ok(enumerate_union_candidates(&shapes, StreakSource::Geometry, tol))
}

/// Streak candidates for the union of arbitrary shapes.
pub fn enumerate_union_candidates(shapes: &[&Shape], source: StreakSource, tol: &Tolerances) -> CandidateSet {
    let mut conics = Vec::new();
    let mut segments = Vec::new();
    let mut corners = Vec::new();
    for shape in shapes {
        for piece in shape.pieces() {
            match piece {
                Piece::Conic(c) => conics.push(c),
                Piece::Segment { a, b, .. } => segments.push((a, b)),
                Piece::Corner { at, .. } => corners.push(at),
            }
        }
    }

    let mut proposals: Vec<Line> = Vec::new();
    proposals.extend(segments.iter().map(|&(a, b)| Line::through(a, b)));
    for i in 0..conics.len() {
        for j in i + 1..conics.len() {
            proposals.extend(common_tangents(&conics[i], &conics[j]));
        }
    }
    for i in 0..corners.len() {
        for j in i + 1..corners.len() {
            if (corners[i] - corners[j]).norm() > tol.dedup_s {
                proposals.push(Line::through(corners[i], corners[j]));
            }
        }
    }
    for &p in &corners {
        for c in &conics {
            proposals.extend(tangents_from_point(c, p));
        }
    }

    let mut lines: Vec<StreakLine> = Vec::new();
    let mut rejected = 0;
    for line in proposals {
        let line = line.canonical();
        if lines
            .iter()
            .any(|l| l.line.approx_eq(&line, tol.dedup_phi, tol.dedup_s))
        {
            continue;
        }
        let events = line_tangencies(shapes, &line, tol);
        let dim = span_dim(&events, tol);
        if dim == 2 {
            lines.push(StreakLine {
                line,
                tangencies: events,
                span_dim: dim,
                source,
            });
        } else {
            rejected += 1;
        }
    }
    lines.sort_by(|a, b| {
        a.line
            .phi
            .total_cmp(&b.line.phi)
            .then(a.line.s.total_cmp(&b.line.s))
    });
    CandidateSet { lines, rejected }
}

/// Whether a single primitive is strictly convex.
pub fn is_strictly_convex(region: &MetalRegion) -> Result<bool> {
    match region.primitives.as_slice() {
        [single] => Ok(matches!(single.shape, Shape::Disk { .. } | Shape::Ellipse { .. })),
        _ => Err(Error::InvalidInput(format!(
            "convexity is decided for single-primitive regions only; `{}` has {}",
            region.label,
            region.primitives.len()
        ))),
    }
}

/// Lines tangent to both conics (arc ranges are ignored here and enforced
/// by the tangency check).
pub fn common_tangents(a: &Conic, b: &Conic) -> Vec<Line> {
    if a.is_circle() && b.is_circle() {
        circle_common_tangents(a.center, a.a, b.center, b.a)
    } else {
        conic_common_tangents(a, b)
    }
}

/// Closed form: a line with normal `theta` is tangent to circle `k` on side
/// `sigma_k` when `s = c_k . theta + sigma_k r_k`; equating the two gives
/// `|c_a - c_b| cos(phi - beta) = sigma_b r_b - sigma_a r_a`.
fn circle_common_tangents(ca: Vec2, ra: f64, cb: Vec2, rb: f64) -> Vec<Line> {
    let delta = ca - cb;
    let dist = delta.norm();
    let mut out = Vec::new();
    if dist == 0.0 {
        return out;
    }
    let beta = delta.angle();
    for &(sa, sb) in &[(1.0, 1.0), (1.0, -1.0)] {
        let rhs = (sb * rb - sa * ra) / dist;
        if rhs.abs() > 1.0 {
            continue;
        }
        let gamma = rhs.acos();
        for phi in [beta + gamma, beta - gamma] {
            let theta = Vec2::unit(phi);
            out.push(Line::new(phi, ca.dot(theta) + sa * ra).canonical());
            if gamma == 0.0 {
                break;
            }
        }
    }
    out
}

const SCAN_SAMPLES: usize = 4096;

/// Roots of `F(phi) = (c_a - c_b) . theta + sigma_a h_a(phi) - sigma_b h_b(phi)`
/// over the full rotation, bracketed on a fine scan and refined by bisection
/// to a residual of 1e-12.
fn conic_common_tangents(a: &Conic, b: &Conic) -> Vec<Line> {
    let mut out = Vec::new();
    for &(sa, sb) in &[(1.0, 1.0), (1.0, -1.0)] {
        let f = |phi: f64| {
            let theta = Vec2::unit(phi);
            (a.center - b.center).dot(theta) + sa * a.support(phi) - sb * b.support(phi)
        };
        let step = TAU / SCAN_SAMPLES as f64;
        let mut prev_phi = 0.0;
        let mut prev = f(0.0);
        for k in 1..=SCAN_SAMPLES {
            let phi = k as f64 * step;
            let cur = f(phi);
            let root = if prev == 0.0 {
                Some(prev_phi)
            } else if prev.signum() != cur.signum() && cur != 0.0 {
                Some(bisect(&f, prev_phi, phi, prev))
            } else {
                None
            };
            if let Some(r) = root {
                let theta = Vec2::unit(r);
                out.push(Line::new(r, a.center.dot(theta) + sa * a.support(r)).canonical());
            }
            prev_phi = phi;
            prev = cur;
        }
    }
    out
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= 1e-12 * 1e-3 || hi - lo < 1e-16 {
            return mid;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Tangent lines from an exterior point to a conic.
pub fn tangents_from_point(c: &Conic, p: Vec2) -> Vec<Line> {
    let q = c.to_unit(p);
    let r = q.norm();
    if r <= 1.0 + 1e-12 {
        return Vec::new();
    }
    let base = q.angle();
    let spread = (1.0 / r).acos();
    [base + spread, base - spread]
        .iter()
        .map(|&g| {
            let touch = c.from_unit(Vec2::unit(g));
            Line::through(p, touch)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn region(shapes: &[Shape]) -> MetalRegion {
        shapes
            .iter()
            .fold(MetalRegion::new("m"), |r, s| r.with(s.clone(), 1.0, -1.0))
    }

    #[test]
    fn single_disk_has_no_candidates() {
        let set = enumerate_streak_candidates(&[region(&[Shape::disk(0.0, 0.0, 1.0)])], &Tolerances::default()).unwrap();
        assert!(set.lines.is_empty());
    }

    #[test]
    fn two_disks_have_four_bitangents() {
        let r = region(&[Shape::disk(-2.0, 0.0, 1.0), Shape::disk(2.0, 0.0, 1.0)]);
        let set = enumerate_streak_candidates(&[r], &Tolerances::for_fov(4.0)).unwrap();
        assert_eq!(set.lines.len(), 4);
        let horizontal: Vec<_> = set
            .lines
            .iter()
            .filter(|l| (l.line.phi - PI / 2.0).abs() < 1e-12)
            .collect();
        assert_eq!(horizontal.len(), 2);
        for l in &set.lines {
            assert_eq!(l.span_dim, 2);
        }
    }

    #[test]
    fn quarter_disk_gives_the_two_axes() {
        let r = region(&[Shape::sector(0.0, 0.0, 1.0, 0.0, PI / 2.0)]);
        let set = enumerate_streak_candidates(&[r], &Tolerances::default()).unwrap();
        assert_eq!(set.lines.len(), 2, "{:?}", set.lines);
        let mut phis: Vec<f64> = set.lines.iter().map(|l| l.line.phi).collect();
        phis.sort_by(f64::total_cmp);
        assert!(phis[0].abs() < 1e-12 && (phis[1] - PI / 2.0).abs() < 1e-12);
        assert!(set.lines.iter().all(|l| l.line.s.abs() < 1e-12));
    }

    #[test]
    fn polygon_edges_each_give_one_line() {
        let r = region(&[Shape::polygon(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])]);
        let set = enumerate_streak_candidates(&[r], &Tolerances::default()).unwrap();
        assert_eq!(set.lines.len(), 4);
    }

    #[test]
    fn ellipse_pair_bitangents_are_tangent() {
        let a = Shape::ellipse(-0.5, 0.1, 0.3, 0.1, 0.4);
        let b = Shape::ellipse(0.5, -0.2, 0.2, 0.15, -1.0);
        let set = enumerate_union_candidates(&[&a, &b], StreakSource::Geometry, &Tolerances::default());
        assert_eq!(set.lines.len(), 4);
        for l in &set.lines {
            assert_eq!(l.tangencies.len(), 2);
        }
    }

    #[test]
    fn strict_convexity() {
        assert!(is_strictly_convex(&region(&[Shape::disk(0.0, 0.0, 1.0)])).unwrap());
        assert!(!is_strictly_convex(&region(&[Shape::polygon(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])])).unwrap());
        assert!(!is_strictly_convex(&region(&[Shape::sector(0.0, 0.0, 1.0, 0.0, PI / 2.0)])).unwrap());
        assert!(is_strictly_convex(&region(&[Shape::disk(0.0, 0.0, 1.0), Shape::disk(3.0, 0.0, 1.0)])).is_err());
    }

    #[test]
    fn point_tangents_touch_conic() {
        let c = Conic {
            center: Vec2::new(0.0, 0.0),
            a: 0.5,
            b: 0.25,
            angle: 0.3,
            arc: None,
        };
        let p = Vec2::new(1.0, 0.7);
        let lines = tangents_from_point(&c, p);
        assert_eq!(lines.len(), 2);
        for l in lines {
            assert!(l.signed_distance(p).abs() < 1e-12);
            let d = l.s - c.center.dot(l.theta());
            assert!((d.abs() - c.support(l.phi)).abs() < 1e-12);
        }
        assert!(tangents_from_point(&c, Vec2::new(0.1, 0.0)).is_empty());
    }
}
