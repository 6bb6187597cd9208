//! Property tests for tangency analysis and streak-candidate enumeration.

use std::f64::consts::PI;

use ctstreak::geometry::{
    enumerate_streak_candidates, line_tangencies, Line, MetalRegion, Shape, TangencyKind, Tolerances,
};
use ctstreak::Vec2;
use proptest::prelude::*;

fn region(shapes: Vec<Shape>) -> MetalRegion {
    shapes
        .into_iter()
        .fold(MetalRegion::new("metal"), |m, s| m.with(s, 1.0, -1.0))
}

fn candidates(shapes: Vec<Shape>) -> Vec<Line> {
    enumerate_streak_candidates(&[region(shapes)], &Tolerances::default())
        .unwrap()
        .lines
        .into_iter()
        .map(|l| l.line)
        .collect()
}

/// Common tangents of two circles from the classical construction: a line
/// `x . theta = s` touches circle i on side `e_i` when `theta . c_i - s = e_i r_i`,
/// so `theta . (c2 - c1) = e2 r2 - e1 r1`.
fn classical_tangents(c1: Vec2, r1: f64, c2: Vec2, r2: f64) -> Vec<Line> {
    let d = Vec2::new(c2.x - c1.x, c2.y - c1.y);
    let (len, psi) = (d.norm(), d.y.atan2(d.x));
    let mut out: Vec<Line> = Vec::new();
    for (e1, e2) in [(1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
        let k: f64 = e2 * r2 - e1 * r1;
        let a = (k / len).acos();
        for phi in [psi + a, psi - a] {
            let theta = Vec2::unit(phi);
            let s = theta.dot(c1) - e1 * r1;
            let line = Line::new(phi, s).canonical();
            if !out.iter().any(|o| o.approx_eq(&line, 1e-9, 1e-9)) {
                out.push(line);
            }
        }
    }
    out
}

fn same_set(a: &[Line], b: &[Line], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|x| b.iter().any(|y| x.approx_eq(y, tol, tol)))
        && b.iter().all(|y| a.iter().any(|x| x.approx_eq(y, tol, tol)))
}

fn disk_pair() -> impl Strategy<Value = (Vec2, f64, Vec2, f64)> {
    (-0.6..0.6f64, -0.6..0.6f64, 0.03..0.25f64, -0.6..0.6f64, -0.6..0.6f64, 0.03..0.25f64)
        .prop_map(|(x1, y1, r1, x2, y2, r2)| (Vec2::new(x1, y1), r1, Vec2::new(x2, y2), r2))
        .prop_filter("disjoint disks", |(c1, r1, c2, r2)| {
            Vec2::new(c2.x - c1.x, c2.y - c1.y).norm() > r1 + r2 + 1e-3
        })
}

fn ellipse() -> impl Strategy<Value = Shape> {
    (-0.4..0.4f64, -0.4..0.4f64, 0.02..0.4f64, 0.02..0.4f64, -PI..PI).prop_map(|(x, y, a, b, t)| Shape::ellipse(x, y, a, b, t))
}

/// Convex polygon with vertices on a circle at sorted random angles.
fn convex_polygon() -> impl Strategy<Value = Shape> {
    (
        -0.3..0.3f64,
        -0.3..0.3f64,
        0.1..0.5f64,
        prop::collection::vec(0.0..2.0 * PI, 3..9),
    )
        .prop_filter_map("well separated vertices", |(x, y, r, mut angles)| {
            angles.sort_by(f64::total_cmp);
            let gaps_ok = angles
                .iter()
                .zip(angles.iter().cycle().skip(1))
                .all(|(a, b)| (b - a).rem_euclid(2.0 * PI) > 0.1);
            // every vertex must be a proper corner: no half-plane holds all gaps
            let max_gap = angles
                .iter()
                .zip(angles.iter().cycle().skip(1))
                .map(|(a, b)| (b - a).rem_euclid(2.0 * PI))
                .fold(0.0, f64::max);
            (gaps_ok && max_gap < PI - 0.1).then(|| {
                let v: Vec<(f64, f64)> = angles.iter().map(|a| (x + r * a.cos(), y + r * a.sin())).collect();
                Shape::polygon(&v)
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn two_disks_give_exactly_the_four_classical_tangents((c1, r1, c2, r2) in disk_pair()) {
        let got = candidates(vec![Shape::disk(c1.x, c1.y, r1), Shape::disk(c2.x, c2.y, r2)]);
        let oracle = classical_tangents(c1, r1, c2, r2);
        prop_assert_eq!(oracle.len(), 4);
        prop_assert!(same_set(&got, &oracle, 1e-9), "got {:?}\noracle {:?}", got, oracle);
    }

    #[test]
    fn single_ellipse_has_no_candidates(e in ellipse()) {
        prop_assert!(candidates(vec![e]).is_empty());
    }

    #[test]
    fn every_polygon_edge_is_one_candidate(poly in convex_polygon()) {
        let Shape::Polygon { vertices } = &poly else { unreachable!() };
        let edges: Vec<Line> = (0..vertices.len())
            .map(|i| Line::through(vertices[i], vertices[(i + 1) % vertices.len()]).canonical())
            .collect();
        let got = candidates(vec![poly.clone()]);
        for e in &edges {
            let hits = got.iter().filter(|g| g.approx_eq(e, 1e-9, 1e-9)).count();
            prop_assert_eq!(hits, 1, "edge {:?}", e);
        }
        prop_assert_eq!(got.len(), edges.len());
    }

    #[test]
    fn candidates_rotate_with_the_metal(
        (c1, r1, c2, r2) in disk_pair(),
        poly in convex_polygon(),
        beta in -PI..PI,
    ) {
        let shapes = vec![Shape::disk(c1.x, c1.y, r1), Shape::disk(c2.x, c2.y, r2), poly];
        let rotated_shapes: Vec<Shape> = shapes.iter().map(|s| s.rotated(beta)).collect();
        let before = candidates(shapes);
        let after = candidates(rotated_shapes);
        let mapped: Vec<Line> = before.iter().map(|l| l.rotated(beta)).collect();
        prop_assert!(same_set(&mapped, &after, 1e-8), "{} vs {}", mapped.len(), after.len());
    }

    #[test]
    fn smooth_tangencies_are_double_roots(a in ellipse(), b in ellipse()) {
        let shapes = [a, b];
        let refs: Vec<&Shape> = shapes.iter().collect();
        let tol = Tolerances::default();
        for line in candidates(shapes.to_vec()) {
            for ev in line_tangencies(&refs, &line, &tol) {
                if ev.kind != TangencyKind::SmoothArc || ev.ambiguous {
                    continue;
                }
                prop_assert!(line.signed_distance(ev.point).abs() < 1e-9);
                // the boundary normal at the touching point is the line normal
                let on = shapes.iter().find_map(|s| {
                    let Shape::Ellipse { center, a, b, angle } = s else { return None };
                    let p = Vec2::new(ev.point.x - center.x, ev.point.y - center.y).rotated(-angle);
                    let level = (p.x / a).powi(2) + (p.y / b).powi(2) - 1.0;
                    (level.abs() < 1e-9).then(|| Vec2::new(p.x / (a * a), p.y / (b * b)).rotated(*angle).normalized())
                });
                let n = on.expect("event point lies on an ellipse boundary");
                prop_assert!(n.cross(line.theta()).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn classical_oracle_reproduces_the_textbook_example() {
    // unit disks at (+-2, 0): horizontal tangents y = +-1, internal tangents of slope +-1/sqrt(3)
    let lines = classical_tangents(Vec2::new(-2.0, 0.0), 1.0, Vec2::new(2.0, 0.0), 1.0);
    let expected = [
        Line::new(PI / 2.0, 1.0),
        Line::new(PI / 2.0, -1.0),
        Line::new(PI / 2.0 + PI / 6.0, 0.0),
        Line::new(PI / 2.0 - PI / 6.0, 0.0),
    ];
    assert!(same_set(&lines, &expected, 1e-12), "{lines:?}");
}

#[test]
fn quarter_turns_keep_all_four_disk_tangents() {
    let shapes = vec![Shape::disk(-0.3, 0.0, 0.1), Shape::disk(0.3, 0.0, 0.1)];
    let base = candidates(shapes.clone());
    for k in 1..4 {
        let beta = k as f64 * PI / 2.0;
        let turned = candidates(shapes.iter().map(|s| s.rotated(beta)).collect());
        let mapped: Vec<Line> = base.iter().map(|l| l.rotated(beta)).collect();
        assert!(same_set(&mapped, &turned, 1e-9), "quarter turn {k}: {turned:?}");
    }
}
