use std::f64::consts::PI;

use rayon::prelude::*;

use crate::grid::{ImageGrid, RasterImage, Sinogram};
use crate::radon::filter::ramp_filter;

/// Adjoint Radon transform `R* h(x) = int h(phi, x . theta) dphi` over the
/// full rotation, by the periodic trapezoid rule with linear interpolation
/// in `s`. Angles where `|x . theta| > s_max` contribute nothing.
///
/// Each pixel sums its angles in index order, so the result does not depend
/// on the thread count.
pub fn backproject(sino: &Sinogram, image: ImageGrid) -> RasterImage {
    let g = sino.grid;
    let weight = 2.0 * PI / g.n_phi as f64;
    let h_s = g.h_s();
    let trig: Vec<(f64, f64)> = (0..g.n_phi).map(|i| g.phi(i).sin_cos()).collect();
    let last = (g.n_s - 1) as f64;
    let mut out = RasterImage::zeros(image);
    out.data
        .par_chunks_mut(image.n)
        .enumerate()
        .for_each(|(r, row)| {
            let y = image.y(r);
            for (c, v) in row.iter_mut().enumerate() {
                let x = image.x(c);
                let mut acc = 0.0;
                for (i, &(sin, cos)) in trig.iter().enumerate() {
                    let u = (x * cos + y * sin + g.s_max) / h_s;
                    if !(0.0..=last).contains(&u) {
                        continue;
                    }
                    let j = (u.floor() as usize).min(g.n_s - 2);
                    let f = u - j as f64;
                    let rowv = sino.row(i);
                    acc += (1.0 - f) * rowv[j] + f * rowv[j + 1];
                }
                *v = acc * weight;
            }
        });
    out
}

/// Filtered backprojection `f = (1/4 pi) R* I^{-1} P`.
pub fn fbp(sino: &Sinogram, image: ImageGrid) -> RasterImage {
    let filtered = ramp_filter(sino);
    backproject(&filtered, image).map(|v| v / (4.0 * PI))
}
