//! Lists the lines tangent to each library metal configuration at two or
//! more points, the only places beam-hardening streaks can appear.

use ctstreak::artifact::{predict_streaks, PredictionMode};
use ctstreak::geometry::library;

fn main() -> ctstreak::Result<()> {
    for name in ["single-disk", "two-disks", "quarter-disk", "metal-bone"] {
        let phantom = library::by_name(name).expect("library phantom");
        let lines = predict_streaks(&phantom, PredictionMode::BeamHardening, None)?;
        println!("{name}: {} line(s)", lines.len());
        for l in &lines {
            println!(
                "  phi = {:.6}, s = {:+.6}, touches at {} point(s)",
                l.line.phi,
                l.line.s,
                l.tangencies.len()
            );
        }
    }
    let scatter = predict_streaks(&library::metal_and_bone(), PredictionMode::Scatter, None)?;
    println!("metal-bone with scatter: {} line(s) over metal and bone together", scatter.len());
    Ok(())
}
