use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Phantom;
use crate::grid::{Sinogram, SinogramGrid};
use crate::radon::{radon_metal, radon_metal_weighted, radon_phantom};
use crate::spectral::spectrum::{Spectrum, SpectrumModel};
use crate::spectral::trace::beam_hardening_trace;

/// Ideal data `P = R f_E0`.
pub fn monochromatic_project(phantom: &Phantom, grid: SinogramGrid) -> Result<Sinogram> {
    radon_phantom(phantom, grid)
}

/// Beam-hardened data for a uniform spectrum and one slope `alpha` shared
/// by all metal: `P = R f_E0 - g(alpha * delta * R chi_D)`.
pub fn polychromatic_project(phantom: &Phantom, spectrum: &Spectrum, grid: SinogramGrid) -> Result<Sinogram> {
    spectrum.validate()?;
    if spectrum.is_monochromatic() {
        return Err(Error::Monochromatic);
    }
    if spectrum.model != SpectrumModel::Uniform {
        return Err(Error::InvalidSpectrum(
            "the closed form needs a uniform spectrum; use the binned projection".into(),
        ));
    }
    let alpha = phantom.shared_alpha().ok_or_else(|| {
        Error::InvalidInput("the closed form needs one slope shared by all metal subregions".into())
    })?;
    let rf = radon_phantom(phantom, grid)?;
    let trace = beam_hardening_trace(&radon_metal(phantom, grid)?, alpha * spectrum.delta)?;
    Ok(rf.zip_with(&trace, |p, t| p - t))
}

/// Beam-hardened data for a binned spectrum and per-subregion slopes:
/// `P = -ln sum_i w_i exp(-R f_E0 - (E_i - E0) sum_j alpha_j R chi_{D_j})`,
/// evaluated as a log-sum-exp.
pub fn polychromatic_project_general(
    phantom: &Phantom,
    spectrum: &Spectrum,
    grid: SinogramGrid,
) -> Result<Sinogram> {
    spectrum.validate()?;
    let SpectrumModel::Binned(bins) = &spectrum.model else {
        return Err(Error::InvalidSpectrum("binned spectrum required".into()));
    };
    let rf = radon_phantom(phantom, grid)?;
    let weighted = radon_metal_weighted(phantom, grid)?;
    let logw: Vec<(f64, f64)> = bins.iter().map(|&(e, w)| (e - spectrum.e0, w.ln())).collect();
    let mut out = rf.clone();
    out.data
        .par_iter_mut()
        .zip(weighted.data.par_iter())
        .for_each(|(p, &m)| {
            let peak = logw
                .iter()
                .map(|&(de, lw)| lw - de * m)
                .fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = logw.iter().map(|&(de, lw)| (lw - de * m - peak).exp()).sum();
            *p -= peak + sum.ln();
        });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{library, MetalRegion, Shape};

    fn grid() -> SinogramGrid {
        SinogramGrid::new(16, 33, 1.5).unwrap()
    }

    #[test]
    fn monochromatic_spectrum_is_rejected() {
        let p = library::two_metal_disks();
        assert!(matches!(
            polychromatic_project(&p, &Spectrum::monochromatic(0.06), grid()),
            Err(Error::Monochromatic)
        ));
    }

    #[test]
    fn one_bin_at_e0_is_monochromatic() {
        let p = library::two_metal_disks();
        let s = Spectrum::binned(0.06, vec![(0.06, 1.0)]).unwrap();
        let a = polychromatic_project_general(&p, &s, grid()).unwrap();
        let b = monochromatic_project(&p, grid()).unwrap();
        for k in 0..a.data.len() {
            assert!((a.data[k] - b.data[k]).abs() <= 1e-15 * b.data[k].abs().max(1.0));
        }
    }

    #[test]
    fn rays_missing_metal_are_unchanged() {
        let p = library::two_metal_disks();
        let s = Spectrum::uniform(0.06, 0.02).unwrap();
        let poly = polychromatic_project(&p, &s, grid()).unwrap();
        let mono = monochromatic_project(&p, grid()).unwrap();
        let metal = radon_metal(&p, grid()).unwrap();
        let mut touched = 0;
        for k in 0..poly.data.len() {
            if metal.data[k] == 0.0 {
                assert_eq!(poly.data[k], mono.data[k]);
            } else {
                touched += 1;
                assert!(poly.data[k] < mono.data[k]);
            }
        }
        assert!(touched > 0);
    }

    #[test]
    fn per_region_slopes_are_respected() {
        let p = Phantom::new(1.0).with_metal(
            MetalRegion::new("m")
                .with(Shape::disk(-0.4, 0.0, 0.1), 1.0, -10.0)
                .with(Shape::disk(0.4, 0.0, 0.1), 1.0, -40.0),
        );
        let s = Spectrum::uniform_bins(0.06, 0.02, 2).unwrap();
        let g = SinogramGrid::new(4, 33, 1.5).unwrap();
        let out = polychromatic_project_general(&p, &s, g).unwrap();
        let rf = monochromatic_project(&p, g).unwrap();
        // phi = 0: vertical rays, each meeting at most one disk
        let i = 1;
        for j in 0..33 {
            let sv = g.s(j);
            let chord_l = Shape::disk(-0.4, 0.0, 0.1).chord_length(&crate::geometry::Line::new(g.phi(i), sv));
            let chord_r = Shape::disk(0.4, 0.0, 0.1).chord_length(&crate::geometry::Line::new(g.phi(i), sv));
            let m = -10.0 * chord_l - 40.0 * chord_r;
            let expect = rf.get(i, j) - (0.5 * (0.01 * m).exp() + 0.5 * (-0.01 * m).exp()).ln();
            assert!((out.get(i, j) - expect).abs() < 1e-13);
        }
    }
}
