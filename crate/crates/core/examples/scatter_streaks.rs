//! Scatter couples metal and bone: lines tangent to both light up in the
//! artifact image, while bone-bone lines stay dark.

use ctstreak::artifact::{predict_streaks, validate_prediction, ExclusionMask, PredictionMode, StreakScorer, ValidationParams};
use ctstreak::geometry::{library, line_tangencies, Tolerances};
use ctstreak::radon::{fbp, radon_phantom};
use ctstreak::spectral::{scatter_project, ScatterModel};
use ctstreak::{ImageGrid, SinogramGrid};

fn main() -> ctstreak::Result<()> {
    let phantom = library::metal_and_bone();
    let sino = SinogramGrid::new(360, 512, 1.42)?;
    let image = ImageGrid::new(256, phantom.fov)?;

    let p = scatter_project(&phantom, &ScatterModel::new(0.01)?, sino)?;
    let artifact = fbp(&p, image).zip_with(&fbp(&radon_phantom(&phantom, sino)?, image), |a, b| a - b);

    let predicted = predict_streaks(&phantom, PredictionMode::Scatter, None)?;
    let scorer = StreakScorer::new(&artifact, ExclusionMask::standard(&phantom, image), 2.0);
    let report = validate_prediction(&scorer, &predicted, ValidationParams::default())?;

    let metal = phantom.metal_shapes();
    let tol = Tolerances::for_fov(phantom.fov);
    for m in &report.measured {
        let touches_metal = !line_tangencies(&metal, &m.line.line, &tol).is_empty();
        println!(
            "phi = {:.4}, s = {:+.4}  {:<10} ratio {:.2}",
            m.line.line.phi,
            m.line.line.s,
            if touches_metal { "metal-bone" } else { "bone-bone" },
            m.ratio.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
