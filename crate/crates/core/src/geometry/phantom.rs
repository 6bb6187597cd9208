use crate::error::{Error, Result};
use crate::geometry::shape::{Primitive, Shape};
use crate::grid::{ImageGrid, RasterImage};
use crate::vec2::Vec2;

/// A metal region `D` made of subregions `D_j`, each with its own spectral
/// slope `alpha_j = d f_E / dE` (negative for metals).
///
/// Subregions are assumed not to overlap: projections add their
/// characteristic functions.
#[derive(Debug, Clone, PartialEq)]
pub struct MetalRegion {
    pub label: String,
    pub primitives: Vec<Primitive>,
    pub alphas: Vec<f64>,
}

impl MetalRegion {
    pub fn new(label: impl Into<String>) -> Self {
        MetalRegion {
            label: label.into(),
            primitives: Vec::new(),
            alphas: Vec::new(),
        }
    }

    /// Adds a subregion with attenuation `value` at the reference energy and
    /// slope `alpha`.
    pub fn with(mut self, shape: Shape, value: f64, alpha: f64) -> Self {
        self.primitives.push(Primitive::new(shape, value));
        self.alphas.push(alpha);
        self
    }

    pub fn shapes(&self) -> impl Iterator<Item = &Shape> {
        self.primitives.iter().map(|p| &p.shape)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.shapes().any(|s| s.contains(p))
    }

    pub fn validate(&self) -> Result<()> {
        if self.primitives.is_empty() {
            return Err(Error::InvalidGeometry(format!("metal region `{}` is empty", self.label)));
        }
        if self.primitives.len() != self.alphas.len() {
            return Err(Error::InvalidGeometry(format!(
                "metal region `{}` has {} primitives but {} slopes",
                self.label,
                self.primitives.len(),
                self.alphas.len()
            )));
        }
        for (p, &alpha) in self.primitives.iter().zip(&self.alphas) {
            p.shape.validate()?;
            if !(alpha < 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidGeometry(format!(
                    "metal region `{}`: spectral slope alpha = {alpha} must be negative",
                    self.label
                )));
            }
        }
        Ok(())
    }

    pub fn rotated(&self, beta: f64) -> MetalRegion {
        MetalRegion {
            label: self.label.clone(),
            primitives: self
                .primitives
                .iter()
                .map(|p| Primitive::new(p.shape.rotated(beta), p.value))
                .collect(),
            alphas: self.alphas.clone(),
        }
    }
}

/// Attenuation map at the reference energy plus metal regions.
///
/// `f_E(x) = f_E0(x) + (E - E0) * sum_j alpha_j * chi_{D_j}(x)`, where `f_E0`
/// sums the values of background and metal primitives.
#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    /// Half-width of the square field of view.
    pub fov: f64,
    pub background: Vec<Primitive>,
    pub metals: Vec<MetalRegion>,
    /// Index into `background` of the strictly convex hull `D_0` used by the
    /// scatter model.
    pub hull: Option<usize>,
}

/// Outcome of the contrast check `min_D f_E0 >= C * sup_{outside D} f_E0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastReport {
    pub min_inside_metal: f64,
    pub max_outside_metal: f64,
    /// Largest `C` satisfying the inequality on the sampled raster.
    pub ratio: f64,
    /// `ratio > 1`.
    pub holds: bool,
}

impl Phantom {
    pub fn new(fov: f64) -> Self {
        Phantom {
            fov,
            background: Vec::new(),
            metals: Vec::new(),
            hull: None,
        }
    }

    pub fn with_background(mut self, shape: Shape, value: f64) -> Self {
        self.background.push(Primitive::new(shape, value));
        self
    }

    /// Adds a background primitive and marks it as the hull `D_0`.
    pub fn with_hull(mut self, shape: Shape, value: f64) -> Self {
        self.background.push(Primitive::new(shape, value));
        self.hull = Some(self.background.len() - 1);
        self
    }

    pub fn with_metal(mut self, region: MetalRegion) -> Self {
        self.metals.push(region);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fov.is_finite() && self.fov > 0.0) {
            return Err(Error::InvalidGeometry(format!("fov = {} must be positive", self.fov)));
        }
        for p in &self.background {
            p.shape.validate()?;
        }
        for m in &self.metals {
            m.validate()?;
        }
        let tol = 1e-9 * self.fov;
        for p in self.all_primitives() {
            let (lo, hi) = p.shape.bounding_box();
            if lo.x < -self.fov - tol || lo.y < -self.fov - tol || hi.x > self.fov + tol || hi.y > self.fov + tol {
                return Err(Error::InvalidGeometry(format!(
                    "{} primitive extends outside the field of view [-{f}, {f}]^2",
                    p.shape.kind_name(),
                    f = self.fov
                )));
            }
        }
        if let Some(h) = self.hull {
            match self.background.get(h) {
                None => return Err(Error::InvalidGeometry(format!("hull index {h} out of range"))),
                Some(p) if !matches!(p.shape, Shape::Disk { .. } | Shape::Ellipse { .. }) => {
                    return Err(Error::InvalidGeometry(
                        "the hull D_0 must be strictly convex (disk or ellipse)".into(),
                    ))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn all_primitives(&self) -> impl Iterator<Item = &Primitive> {
        self.background
            .iter()
            .chain(self.metals.iter().flat_map(|m| m.primitives.iter()))
    }

    /// Metal subregions with their slopes.
    pub fn metal_primitives(&self) -> impl Iterator<Item = (&Primitive, f64)> {
        self.metals
            .iter()
            .flat_map(|m| m.primitives.iter().zip(m.alphas.iter().copied()))
    }

    pub fn metal_shapes(&self) -> Vec<&Shape> {
        self.metals.iter().flat_map(|m| m.shapes()).collect()
    }

    /// Piecewise-constant subdomains `D_1 .. D_N` (every primitive except the hull).
    pub fn subdomain_shapes(&self) -> Vec<&Shape> {
        self.background
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != self.hull)
            .map(|(_, p)| &p.shape)
            .chain(self.metal_shapes())
            .collect()
    }

    pub fn hull_shape(&self) -> Option<&Shape> {
        self.hull.and_then(|h| self.background.get(h)).map(|p| &p.shape)
    }

    /// One slope shared by every metal subregion, if there is one.
    pub fn shared_alpha(&self) -> Option<f64> {
        let mut alphas = self.metals.iter().flat_map(|m| m.alphas.iter().copied());
        let first = alphas.next()?;
        alphas.all(|a| a == first).then_some(first)
    }

    /// `f_E0(x)`.
    pub fn reference_attenuation(&self, p: Vec2) -> f64 {
        self.all_primitives()
            .filter(|q| q.shape.contains(p))
            .map(|q| q.value)
            .sum()
    }

    /// `f_E(x)` at energy `energy` for reference energy `e0`.
    pub fn attenuation_at(&self, p: Vec2, energy: f64, e0: f64) -> f64 {
        let metal: f64 = self
            .metal_primitives()
            .filter(|(q, _)| q.shape.contains(p))
            .map(|(_, alpha)| alpha)
            .sum();
        self.reference_attenuation(p) + (energy - e0) * metal
    }

    /// `chi_D(x)` for the union of all metal regions.
    pub fn in_metal(&self, p: Vec2) -> bool {
        self.metals.iter().any(|m| m.contains(p))
    }

    pub fn max_support_radius(&self) -> f64 {
        self.all_primitives()
            .map(|p| p.shape.bounding_radius())
            .fold(0.0, f64::max)
    }

    /// Samples `f_E0` at pixel centres, averaging `supersample^2` points per pixel.
    pub fn rasterize(&self, grid: ImageGrid, supersample: usize) -> RasterImage {
        let k = supersample.max(1);
        let pitch = grid.pitch();
        RasterImage::from_fn(grid, |c| {
            let mut acc = 0.0;
            for a in 0..k {
                for b in 0..k {
                    let off = Vec2::new(
                        ((a as f64 + 0.5) / k as f64 - 0.5) * pitch,
                        ((b as f64 + 0.5) / k as f64 - 0.5) * pitch,
                    );
                    acc += self.reference_attenuation(c + off);
                }
            }
            acc / (k * k) as f64
        })
    }

    /// Checks the metal contrast condition on an `n x n` raster. A failing
    /// check is logged as a warning; it does not make the phantom invalid.
    pub fn contrast_check(&self, n: usize) -> ContrastReport {
        let grid = ImageGrid { n, fov: self.fov };
        let mut min_in = f64::INFINITY;
        let mut max_out = f64::NEG_INFINITY;
        for r in 0..n {
            for c in 0..n {
                let p = grid.center(r, c);
                let v = self.reference_attenuation(p);
                if self.in_metal(p) {
                    min_in = min_in.min(v);
                } else {
                    max_out = max_out.max(v);
                }
            }
        }
        let ratio = if max_out > 0.0 { min_in / max_out } else { f64::INFINITY };
        let holds = ratio > 1.0;
        if !holds {
            log::warn!(
                "metal contrast check fails: min f_E0 in metal = {min_in}, max outside = {max_out}"
            );
        }
        ContrastReport {
            min_inside_metal: min_in,
            max_outside_metal: max_out,
            ratio,
            holds,
        }
    }

    pub fn rotated(&self, beta: f64) -> Phantom {
        Phantom {
            fov: self.fov,
            background: self
                .background
                .iter()
                .map(|p| Primitive::new(p.shape.rotated(beta), p.value))
                .collect(),
            metals: self.metals.iter().map(|m| m.rotated(beta)).collect(),
            hull: self.hull,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn overlap_phantom() -> Phantom {
        Phantom::new(2.0)
            .with_background(Shape::disk(0.0, 0.0, 1.0), 1.0)
            .with_metal(MetalRegion::new("m").with(Shape::disk(0.2, 0.0, 0.3), 0.0, -2.0))
    }

    #[test]
    fn attenuation_substitutes_linear_energy_model() {
        let ph = overlap_phantom();
        let p = Vec2::new(0.2, 0.0);
        assert!((ph.attenuation_at(p, 0.06 + 0.1, 0.06) - 0.8).abs() < 1e-12);
        assert_eq!(ph.attenuation_at(Vec2::new(-0.8, 0.0), 5.0, 0.06), 1.0);
        assert_eq!(ph.attenuation_at(p, 0.06, 0.06), 1.0);
    }

    #[test]
    fn validation_catches_positive_alpha_and_fov_overflow() {
        let bad_alpha = Phantom::new(2.0)
            .with_metal(MetalRegion::new("m").with(Shape::disk(0.0, 0.0, 0.3), 1.0, 0.5));
        assert!(bad_alpha.validate().is_err());
        let outside = Phantom::new(1.0).with_background(Shape::disk(0.5, 0.0, 0.6), 1.0);
        assert!(outside.validate().is_err());
        assert!(overlap_phantom().validate().is_ok());
    }

    #[test]
    fn contrast_check_reports_ratio() {
        let ph = Phantom::new(1.0)
            .with_background(Shape::disk(0.0, 0.0, 0.9), 0.2)
            .with_metal(MetalRegion::new("m").with(Shape::disk(0.0, 0.0, 0.2), 3.0, -1.0));
        let rep = ph.contrast_check(64);
        assert!(rep.holds);
        assert!((rep.ratio - 3.2 / 0.2).abs() < 1e-12);
        assert!(!overlap_phantom().contrast_check(64).holds);
    }

    #[test]
    fn shared_alpha() {
        let ph = Phantom::new(1.0)
            .with_metal(MetalRegion::new("a").with(Shape::disk(0.3, 0.0, 0.1), 1.0, -2.0))
            .with_metal(MetalRegion::new("b").with(Shape::disk(-0.3, 0.0, 0.1), 1.0, -2.0));
        assert_eq!(ph.shared_alpha(), Some(-2.0));
        let ph = ph.with_metal(MetalRegion::new("c").with(Shape::disk(0.0, 0.5, 0.1), 1.0, -3.0));
        assert_eq!(ph.shared_alpha(), None);
    }
}
