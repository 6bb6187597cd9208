//! Isolated detector spikes each produce one streak along their own line.

use ctstreak::artifact::{predict_streaks, validate_prediction, ExclusionMask, PredictionMode, StreakScorer, ValidationParams};
use ctstreak::geometry::library;
use ctstreak::radon::fbp;
use ctstreak::spectral::{noisy_project, NoiseSpikes, SpikeLaw};
use ctstreak::{ImageGrid, SinogramGrid};

fn main() -> ctstreak::Result<()> {
    let phantom = library::two_metal_disks();
    let sino = SinogramGrid::new(360, 512, 1.42)?;
    let image = ImageGrid::new(256, phantom.fov)?;
    let law = SpikeLaw {
        count: 3,
        lambda: 4.0,
        gain: 5e-5,
        s_limit: 0.7,
    };
    let spikes = NoiseSpikes::generate(sino, law, 11)?;
    for s in &spikes.spikes {
        println!("spike at phi = {:.4}, s = {:+.4}, c = {:.2e}", s.phi, s.s, s.c);
    }
    let recon = fbp(&noisy_project(&phantom, &spikes, sino)?, image);
    let predicted = predict_streaks(&phantom, PredictionMode::Noise, Some(&spikes))?;
    let scorer = StreakScorer::new(&recon, ExclusionMask::standard(&phantom, image), 2.0);
    print!("{}", validate_prediction(&scorer, &predicted, ValidationParams::default())?.summary());
    Ok(())
}
