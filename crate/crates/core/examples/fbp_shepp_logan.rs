//! Analytic projection of the Shepp-Logan phantom and its filtered
//! backprojection, with the relative L2 error against the rasterized phantom.

use ctstreak::geometry::library;
use ctstreak::radon::{fbp, radon_phantom};
use ctstreak::{ImageGrid, SinogramGrid};

fn main() -> ctstreak::Result<()> {
    let phantom = library::shepp_logan();
    let image = ImageGrid::new(256, 1.0)?;
    let sino = radon_phantom(&phantom, SinogramGrid::new(360, 512, 1.42)?)?;
    let recon = fbp(&sino, image);
    let truth = phantom.rasterize(image, 4);

    let (mut err, mut norm) = (0.0, 0.0);
    for (a, b) in recon.data.iter().zip(&truth.data) {
        err += (a - b) * (a - b);
        norm += b * b;
    }
    println!("relative L2 error (all pixels, edges included): {:.4}", (err / norm).sqrt());
    let centre = recon.sample(ctstreak::Vec2::new(0.0, -0.3));
    println!("reconstruction at (0, -0.3): {centre:.4} (phantom value 0.2)");
    Ok(())
}
