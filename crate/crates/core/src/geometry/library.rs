//! Ready-made phantoms used by the examples, tests and demo configs.
//!
//! All live in a field of view of half-width 1. Metal values are additive
//! on top of the water hull, so the metal attenuation is `0.2 + 1.0`.

use std::f64::consts::PI;

use crate::geometry::phantom::{MetalRegion, Phantom};
use crate::geometry::shape::Shape;

/// Water-like hull value.
pub const WATER: f64 = 0.2;
/// Metal value added on top of water.
pub const METAL: f64 = 1.0;
/// Values added on top of water in [`metal_and_bone`].
pub const DENSE_METAL: f64 = 40.0;
pub const DENSE_BONE: f64 = 4.0;
/// Demo spectral slope; with `delta = 0.02` the trace argument peaks at 3
/// for two disks of radius 0.1 seen edge on.
pub const DEMO_ALPHA: f64 = -375.0;

fn water_hull() -> Phantom {
    Phantom::new(1.0).with_hull(Shape::disk(0.0, 0.0, 0.8), WATER)
}

const SHEPP_LOGAN_ELLIPSES: [(f64, f64, f64, f64, f64); 10] = [
    (0.0, 0.0, 0.69, 0.92, 0.0),
    (0.0, -0.0184, 0.6624, 0.874, 0.0),
    (0.22, 0.0, 0.11, 0.31, -18.0),
    (-0.22, 0.0, 0.16, 0.41, 18.0),
    (0.0, 0.35, 0.21, 0.25, 0.0),
    (0.0, 0.1, 0.046, 0.046, 0.0),
    (0.0, -0.1, 0.046, 0.046, 0.0),
    (-0.08, -0.605, 0.046, 0.023, 0.0),
    (0.0, -0.606, 0.023, 0.023, 0.0),
    (0.06, -0.605, 0.023, 0.046, 0.0),
];

fn shepp_logan_with(values: [f64; 10]) -> Phantom {
    let deg = PI / 180.0;
    let mut p = Phantom::new(1.0);
    for (i, (&(cx, cy, a, b, ang), v)) in SHEPP_LOGAN_ELLIPSES.iter().zip(values).enumerate() {
        // semi-axis `a` lies along x before rotation
        let shape = Shape::ellipse(cx, cy, a, b, ang * deg);
        p = if i == 0 { p.with_hull(shape, v) } else { p.with_background(shape, v) };
    }
    p
}

/// Modified Shepp-Logan head phantom (high-contrast variant), no metal.
pub fn shepp_logan() -> Phantom {
    shepp_logan_with([1.0, -0.8, -0.2, -0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1])
}

/// Shepp-Logan head phantom with its original intensities: skull 2, brain
/// 1.02, soft-tissue details within 0.03 of the brain.
pub fn shepp_logan_original() -> Phantom {
    shepp_logan_with([2.0, -0.98, -0.02, -0.02, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01])
}

/// Two metal disks of radius 0.1 at `(+-0.3, 0)` inside a water disk.
pub fn two_metal_disks() -> Phantom {
    water_hull().with_metal(
        MetalRegion::new("metal")
            .with(Shape::disk(-0.3, 0.0, 0.1), METAL, DEMO_ALPHA)
            .with(Shape::disk(0.3, 0.0, 0.1), METAL, DEMO_ALPHA),
    )
}

/// One metal disk of radius 0.15, off centre.
pub fn single_metal_disk() -> Phantom {
    water_hull().with_metal(MetalRegion::new("metal").with(Shape::disk(0.1, 0.05, 0.15), METAL, DEMO_ALPHA))
}

/// Quarter disk of radius 0.3 with its corner at the origin.
pub fn quarter_disk_metal() -> Phantom {
    water_hull().with_metal(MetalRegion::new("metal").with(
        Shape::sector(0.0, 0.0, 0.3, 0.0, PI / 2.0),
        METAL,
        DEMO_ALPHA,
    ))
}

/// One dense metal disk and two bone disks inside water. Rays through the
/// metal have `R f_E0` near 8, so a scatter constant of 0.01 dominates their
/// transmitted intensity.
pub fn metal_and_bone() -> Phantom {
    water_hull()
        .with_background(Shape::disk(0.3, 0.25, 0.12), DENSE_BONE)
        .with_background(Shape::disk(0.3, -0.3, 0.12), DENSE_BONE)
        .with_metal(MetalRegion::new("metal").with(Shape::disk(-0.3, 0.0, 0.1), DENSE_METAL, DEMO_ALPHA))
}

/// Looks up a library phantom by name.
pub fn by_name(name: &str) -> Option<Phantom> {
    Some(match name {
        "shepp-logan" => shepp_logan(),
        "shepp-logan-original" => shepp_logan_original(),
        "two-disks" => two_metal_disks(),
        "single-disk" => single_metal_disk(),
        "quarter-disk" => quarter_disk_metal(),
        "metal-bone" => metal_and_bone(),
        _ => return None,
    })
}

pub const NAMES: [&str; 6] = ["shepp-logan", "shepp-logan-original", "two-disks", "single-disk", "quarter-disk", "metal-bone"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_phantoms_are_valid() {
        for name in NAMES {
            let p = by_name(name).unwrap();
            p.validate().unwrap();
        }
    }

    #[test]
    fn metal_contrast_holds_for_metal_phantoms() {
        for p in [two_metal_disks(), single_metal_disk(), quarter_disk_metal(), metal_and_bone()] {
            assert!(p.contrast_check(64).holds);
        }
    }
}
