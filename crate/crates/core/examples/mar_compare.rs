//! Linear and Poisson completion of the metal trace: streak ratios on two
//! disks before and after, and how well each keeps a background ridge that
//! crosses the trace.

use ctstreak::artifact::{predict_streaks, validate_prediction, ExclusionMask, PredictionMode, StreakScorer, ValidationParams};
use ctstreak::geometry::library;
use ctstreak::mar::{mar_linear, mar_poisson, metal_trace, RidgeFixture, DEFAULT_ZETA_QUANTILE};
use ctstreak::radon::{fbp, radon_metal};
use ctstreak::spectral::{polychromatic_project, Spectrum};
use ctstreak::{ImageGrid, RasterImage, SinogramGrid};

fn main() -> ctstreak::Result<()> {
    let phantom = library::two_metal_disks();
    let sino = SinogramGrid::new(360, 512, 1.42)?;
    let image = ImageGrid::new(256, phantom.fov)?;
    let p = polychromatic_project(&phantom, &Spectrum::uniform(0.06, 0.02)?, sino)?;
    let trace = metal_trace(&radon_metal(&phantom, sino)?, None)?;
    println!("metal trace covers {} of {} bins", trace.len(), sino.len());

    let predicted = predict_streaks(&phantom, PredictionMode::BeamHardening, None)?;
    let mask = ExclusionMask::standard(&phantom, image);
    let mean_ratio = |img: &RasterImage| -> ctstreak::Result<f64> {
        let scorer = StreakScorer::new(img, mask.clone(), 2.0);
        let r = validate_prediction(&scorer, &predicted, ValidationParams::default())?;
        Ok(r.mean_ratio().unwrap_or(f64::NAN))
    };
    println!("before MAR: mean ratio {:.3}", mean_ratio(&fbp(&p, image))?);
    println!("linear:     mean ratio {:.3}", mean_ratio(&fbp(&mar_linear(&p, &trace)?, image))?);
    println!(
        "poisson:    mean ratio {:.3}",
        mean_ratio(&fbp(&mar_poisson(&p, &trace, DEFAULT_ZETA_QUANTILE)?, image))?
    );

    let ridge = RidgeFixture::default();
    let (rp, rt) = (ridge.corrupted(), ridge.trace()?);
    println!(
        "ridge crest retention: linear {:.3}, poisson {:.3}",
        ridge.crest_retention(&mar_linear(&rp, &rt)?),
        ridge.crest_retention(&mar_poisson(&rp, &rt, DEFAULT_ZETA_QUANTILE)?)
    );
    Ok(())
}
