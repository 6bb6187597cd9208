use rayon::prelude::*;

use crate::grid::{RasterImage, Sinogram, SinogramGrid};
use crate::vec2::Vec2;

/// Radon transform of a raster: each line is sampled every half pixel
/// pitch with bilinear interpolation, the image being zero outside its
/// field of view.
pub fn radon_numeric(image: &RasterImage, grid: SinogramGrid) -> Sinogram {
    let step = 0.5 * image.grid.pitch();
    let half_len = image.grid.fov * std::f64::consts::SQRT_2;
    let n_t = (half_len / step).ceil() as i64;
    let mut out = Sinogram::zeros(grid);
    out.data
        .par_chunks_mut(grid.n_s)
        .enumerate()
        .for_each(|(i, row)| {
            let theta = Vec2::unit(grid.phi(i));
            let perp = theta.perp();
            for (j, v) in row.iter_mut().enumerate() {
                let base = grid.s(j) * theta;
                let mut acc = 0.0;
                for k in -n_t..=n_t {
                    acc += image.sample(base + (k as f64 * step) * perp);
                }
                *v = acc * step;
            }
        });
    out
}
