use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Phantom;
use crate::grid::{ImageGrid, RasterImage, Sinogram, SinogramGrid};
use crate::radon::{backproject, fbp, radon_metal, radon_phantom, ramp_filter};
use crate::spectral::{beam_hardening_trace, polychromatic_project, Spectrum};

/// `f_MA = -(1/4 pi) R* I^{-1} g(alpha delta R chi_D)`.
pub fn metal_artifact_image(metal_sino: &Sinogram, alpha_delta: f64, image: ImageGrid) -> Result<RasterImage> {
    let trace = beam_hardening_trace(metal_sino, alpha_delta)?;
    Ok(fbp(&trace, image).map(|v| -v))
}

/// Reconstruction of polychromatic data split into the artifact-free part
/// and the metal artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct ArtifactDecomposition {
    pub f_ct: RasterImage,
    pub f_e0_recon: RasterImage,
    pub f_ma: RasterImage,
    /// `max |f_ct - f_e0_recon - f_ma| / max |f_ct|`.
    pub max_linearity_residual: f64,
}

impl ArtifactDecomposition {
    /// Projects `phantom` with the uniform `spectrum` and reconstructs the
    /// three images independently.
    pub fn compute(phantom: &Phantom, spectrum: &Spectrum, sino: SinogramGrid, image: ImageGrid) -> Result<Self> {
        let p = polychromatic_project(phantom, spectrum, sino)?;
        let rf = radon_phantom(phantom, sino)?;
        let alpha = phantom
            .shared_alpha()
            .ok_or_else(|| Error::InvalidInput("phantom has no metal".into()))?;
        let f_ma = metal_artifact_image(&radon_metal(phantom, sino)?, alpha * spectrum.delta, image)?;
        Ok(Self::from_parts(fbp(&p, image), fbp(&rf, image), f_ma))
    }

    pub fn from_parts(f_ct: RasterImage, f_e0_recon: RasterImage, f_ma: RasterImage) -> Self {
        let scale = f_ct.max_abs();
        let worst = f_ct
            .data
            .iter()
            .zip(&f_e0_recon.data)
            .zip(&f_ma.data)
            .fold(0.0, |m: f64, ((c, e), a)| m.max((c - e - a).abs()));
        ArtifactDecomposition {
            f_ct,
            f_e0_recon,
            f_ma,
            max_linearity_residual: if scale > 0.0 { worst / scale } else { worst },
        }
    }
}

/// Truncated series for `f_MA`.
///
/// With `x = alpha delta R chi_D` and `u_N = sum_{n=1..N} x^{2n} / (2n+1)!`,
/// the trace is `ln(1 + u) = sum_{k>=1} (-1)^{k+1} u^k / k`. Each outer term
/// `u_N^k` is formed pointwise on the sinogram, then filtered and
/// backprojected on its own; the images are summed in order of `k`.
/// Requires `|alpha delta| max(R chi_D) <= 1`.
pub fn fma_series(
    metal_sino: &Sinogram,
    alpha_delta: f64,
    k_outer: usize,
    n_inner: usize,
    image: ImageGrid,
) -> Result<RasterImage> {
    let x_max = alpha_delta.abs() * metal_sino.max_abs();
    if x_max > 1.0 {
        return Err(Error::SeriesGuard(x_max));
    }
    let mut out = RasterImage::zeros(image);
    if alpha_delta == 0.0 || k_outer == 0 || n_inner == 0 {
        return Ok(out);
    }
    let inner = metal_sino.map(|r| {
        let x2 = (alpha_delta * r) * (alpha_delta * r);
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 1..=n_inner {
            let n = n as f64;
            term *= x2 / ((2.0 * n) * (2.0 * n + 1.0));
            sum += term;
        }
        sum
    });
    let mut power = inner.clone();
    for k in 1..=k_outer {
        if k > 1 {
            power = power.zip_with(&inner, |a, b| a * b);
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let coeff = -sign / (k as f64 * 4.0 * PI);
        let term = backproject(&ramp_filter(&power), image);
        for (o, t) in out.data.iter_mut().zip(&term.data) {
            *o += coeff * t;
        }
    }
    Ok(out)
}

/// Largest trace argument `|alpha delta| max(R chi_D)`.
pub fn max_trace_argument(metal_sino: &Sinogram, alpha_delta: f64) -> f64 {
    alpha_delta.abs() * metal_sino.max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::library;

    #[test]
    fn empty_metal_gives_zero_image() {
        let g = SinogramGrid::new(16, 33, 1.5).unwrap();
        let img = metal_artifact_image(&Sinogram::zeros(g), -5.0, ImageGrid::new(16, 1.0).unwrap()).unwrap();
        assert!(img.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn decomposition_is_exact() {
        let p = library::two_metal_disks();
        let s = Spectrum::uniform(0.06, 0.02).unwrap();
        let d = ArtifactDecomposition::compute(
            &p,
            &s,
            SinogramGrid::new(60, 97, 1.5).unwrap(),
            ImageGrid::new(48, 1.0).unwrap(),
        )
        .unwrap();
        assert!(d.max_linearity_residual <= 1e-10, "{}", d.max_linearity_residual);
    }

    #[test]
    fn series_guard() {
        let g = SinogramGrid::new(4, 9, 1.5).unwrap();
        let s = Sinogram::from_fn(g, |_, _| 2.0);
        assert!(matches!(
            fma_series(&s, 0.6, 2, 2, ImageGrid::new(4, 1.0).unwrap()),
            Err(Error::SeriesGuard(_))
        ));
        let z = fma_series(&s, 0.0, 2, 2, ImageGrid::new(4, 1.0).unwrap()).unwrap();
        assert!(z.data.iter().all(|&v| v == 0.0));
    }
}
