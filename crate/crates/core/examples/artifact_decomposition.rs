//! Splits a polychromatic reconstruction into the ideal image and the metal
//! artifact image, and checks the artifact image against its power series.

use ctstreak::artifact::{fma_series, max_trace_argument, metal_artifact_image, ArtifactDecomposition};
use ctstreak::geometry::{library, MetalRegion, Phantom, Shape};
use ctstreak::radon::radon_metal;
use ctstreak::spectral::Spectrum;
use ctstreak::{ImageGrid, SinogramGrid};

fn main() -> ctstreak::Result<()> {
    let sino = SinogramGrid::new(180, 256, 1.42)?;
    let image = ImageGrid::new(128, 1.0)?;

    let d = ArtifactDecomposition::compute(&library::two_metal_disks(), &Spectrum::uniform(0.06, 0.02)?, sino, image)?;
    println!("max |f_CT - f_E0 - f_MA| / max |f_CT| = {:.2e}", d.max_linearity_residual);
    println!("max |f_MA| = {:.4}", d.f_ma.max_abs());

    // a weaker metal keeps the series inside its radius of convergence
    let mild = Phantom::new(1.0).with_metal(
        MetalRegion::new("metal")
            .with(Shape::disk(-0.3, 0.0, 0.1), 1.0, -1.0)
            .with(Shape::disk(0.3, 0.0, 0.1), 1.0, -1.0),
    );
    let metal = radon_metal(&mild, sino)?;
    let alpha_delta = -1.0 * 2.0;
    println!("trace argument {:.3}", max_trace_argument(&metal, alpha_delta));
    let closed = metal_artifact_image(&metal, alpha_delta, image)?;
    for k in [1, 2, 5, 20] {
        let series = fma_series(&metal, alpha_delta, k, 20, image)?;
        let diff = closed.zip_with(&series, |a, b| a - b).max_abs() / closed.max_abs();
        println!("K = {k:>2}: relative difference {diff:.2e}");
    }
    Ok(())
}
