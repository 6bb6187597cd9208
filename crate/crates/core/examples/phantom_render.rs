//! Builds a phantom in code, saves it in the text format, reads it back and
//! renders it to a windowed PGM.
//!
//! `cargo run --example phantom_render -- /tmp/phantom`

use std::path::PathBuf;

use ctstreak::geometry::{format_phantom, parse_phantom, MetalRegion, Phantom, Shape};
use ctstreak::{io, ImageGrid};

fn main() -> ctstreak::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "phantom_out".into()));
    std::fs::create_dir_all(&dir)?;

    let phantom = Phantom::new(1.0)
        .with_hull(Shape::ellipse(0.0, 0.0, 0.85, 0.7, 0.0), 0.2)
        .with_background(Shape::disk(0.35, 0.3, 0.1), 0.15)
        .with_metal(
            MetalRegion::new("screw")
                .with(Shape::polygon(&[(-0.4, -0.05), (0.1, -0.05), (0.1, 0.05), (-0.4, 0.05)]), 1.0, -300.0),
        );
    phantom.validate()?;

    let text = format_phantom(&phantom);
    print!("{text}");
    assert_eq!(parse_phantom(&text)?, phantom);
    std::fs::write(dir.join("screw.phantom"), &text)?;

    let contrast = phantom.contrast_check(128);
    println!("metal contrast ratio {:.2} (holds: {})", contrast.ratio, contrast.holds);

    let img = phantom.rasterize(ImageGrid::new(256, phantom.fov)?, 4);
    let window = (0.0, 1.2);
    std::fs::write(dir.join("screw.pgm"), io::image_to_pgm(&img, window))?;
    std::fs::write(dir.join("screw.pgm.window"), io::window_sidecar(window))?;
    println!("wrote {}", dir.display());
    Ok(())
}
