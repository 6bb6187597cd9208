//! Beam-hardening streaks between two metal disks: predict the four
//! bitangent lines and measure them in the reconstruction.

use ctstreak::artifact::{predict_streaks, validate_prediction, ExclusionMask, PredictionMode, StreakScorer, ValidationParams};
use ctstreak::geometry::library;
use ctstreak::radon::fbp;
use ctstreak::spectral::{polychromatic_project, Spectrum};
use ctstreak::{ImageGrid, SinogramGrid};

fn main() -> ctstreak::Result<()> {
    let phantom = library::two_metal_disks();
    let sino_grid = SinogramGrid::new(360, 512, 1.42)?;
    let image_grid = ImageGrid::new(256, phantom.fov)?;

    let spectrum = Spectrum::uniform(0.06, 0.02)?;
    let p = polychromatic_project(&phantom, &spectrum, sino_grid)?;
    let f_ct = fbp(&p, image_grid);

    let predicted = predict_streaks(&phantom, PredictionMode::BeamHardening, None)?;
    let scorer = StreakScorer::new(&f_ct, ExclusionMask::standard(&phantom, image_grid), 2.0);
    let report = validate_prediction(&scorer, &predicted, ValidationParams::default())?;
    print!("{}", report.summary());
    Ok(())
}
