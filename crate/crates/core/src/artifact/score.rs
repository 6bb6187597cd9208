use rayon::prelude::*;

use crate::geometry::{Line, Phantom};
use crate::grid::{ImageGrid, RasterImage};

/// Pixels excluded from streak scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionMask {
    pub grid: ImageGrid,
    pub masked: Vec<bool>,
}

impl ExclusionMask {
    pub fn empty(grid: ImageGrid) -> Self {
        ExclusionMask {
            grid,
            masked: vec![false; grid.len()],
        }
    }

    /// Metal dilated by `metal_px` pixels plus a band of `edge_px` pixels
    /// around every boundary of the phantom. A pixel lies on a boundary
    /// when the set of primitives containing its centre differs from that
    /// of a 4-neighbour.
    pub fn for_phantom(phantom: &Phantom, grid: ImageGrid, metal_px: f64, edge_px: f64) -> Self {
        let n = grid.n;
        let prims: Vec<_> = phantom.all_primitives().map(|p| &p.shape).collect();
        let signature: Vec<Vec<bool>> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let p = grid.center(k / n, k % n);
                prims.iter().map(|s| s.contains(p)).collect()
            })
            .collect();
        let metal: Vec<bool> = (0..n * n)
            .into_par_iter()
            .map(|k| phantom.in_metal(grid.center(k / n, k % n)))
            .collect();
        let mut edge = vec![false; n * n];
        for r in 0..n {
            for c in 0..n {
                let k = r * n + c;
                let differs = (c + 1 < n && signature[k] != signature[k + 1])
                    || (r + 1 < n && signature[k] != signature[k + n]);
                if differs {
                    edge[k] = true;
                    if c + 1 < n && signature[k] != signature[k + 1] {
                        edge[k + 1] = true;
                    }
                    if r + 1 < n && signature[k] != signature[k + n] {
                        edge[k + n] = true;
                    }
                }
            }
        }
        let mut masked = dilate(&metal, n, metal_px);
        for (m, e) in masked.iter_mut().zip(dilate(&edge, n, edge_px)) {
            *m |= e;
        }
        ExclusionMask { grid, masked }
    }

    /// Standard mask: metal plus 3 px, discontinuities plus 2 px.
    pub fn standard(phantom: &Phantom, grid: ImageGrid) -> Self {
        Self::for_phantom(phantom, grid, 3.0, 2.0)
    }

    pub fn is_masked(&self, row: usize, col: usize) -> bool {
        self.masked[row * self.grid.n + col]
    }

    pub fn count(&self) -> usize {
        self.masked.iter().filter(|&&m| m).count()
    }
}

/// Marks every pixel within Euclidean distance `radius` (in pixels) of a
/// set pixel.
fn dilate(set: &[bool], n: usize, radius: f64) -> Vec<bool> {
    let r = radius.floor() as isize;
    let r2 = radius * radius;
    let offsets: Vec<(isize, isize)> = (-r..=r)
        .flat_map(|dr| (-r..=r).map(move |dc| (dr, dc)))
        .filter(|&(dr, dc)| ((dr * dr + dc * dc) as f64) <= r2)
        .collect();
    let mut out = vec![false; n * n];
    for (k, _) in set.iter().enumerate().filter(|(_, &s)| s) {
        let (row, col) = ((k / n) as isize, (k % n) as isize);
        for &(dr, dc) in &offsets {
            let (rr, cc) = (row + dr, col + dc);
            if rr >= 0 && cc >= 0 && (rr as usize) < n && (cc as usize) < n {
                out[rr as usize * n + cc as usize] = true;
            }
        }
    }
    out
}

/// Separable Gaussian blur, truncated at four standard deviations, with
/// mirrored borders.
pub fn gaussian_blur(image: &RasterImage, sigma_px: f64) -> RasterImage {
    let n = image.grid.n;
    if sigma_px <= 0.0 {
        return image.clone();
    }
    let half = (4.0 * sigma_px).ceil() as isize;
    let mut kernel: Vec<f64> = (-half..=half)
        .map(|k| (-0.5 * (k as f64 / sigma_px).powi(2)).exp())
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|w| *w /= total);
    let reflect = |i: isize| -> usize {
        let m = n as isize;
        let mut i = i;
        loop {
            if i < 0 {
                i = -i - 1;
            } else if i >= m {
                i = 2 * m - i - 1;
            } else {
                return i as usize;
            }
        }
    };
    let mut tmp = vec![0.0; n * n];
    tmp.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
        for (c, v) in row.iter_mut().enumerate() {
            *v = kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * image.data[r * n + reflect(c as isize + k as isize - half)])
                .sum();
        }
    });
    let mut out = RasterImage::zeros(image.grid);
    out.data.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
        for (c, v) in row.iter_mut().enumerate() {
            *v = kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * tmp[reflect(r as isize + k as isize - half) * n + c])
                .sum();
        }
    });
    out
}

/// `image - blur(image)`.
pub fn high_pass(image: &RasterImage, sigma_px: f64) -> RasterImage {
    let blur = gaussian_blur(image, sigma_px);
    image.zip_with(&blur, |a, b| a - b)
}

/// Fewest unmasked samples for a defined score.
pub const MIN_SAMPLES: usize = 20;

/// Scores lines on one image: the mean of `|image - blur(image)|` over
/// unmasked samples spaced one pixel pitch apart along the line.
///
/// Samples are taken inside the circular field of view `|x| <= fov`, the
/// disk every view covers. Clipping to the square image instead would give
/// diagonal lines up to `sqrt(2)` times more corner samples than axis-aligned
/// ones and make scores depend on the phantom's orientation.
#[derive(Debug, Clone)]
pub struct StreakScorer {
    residual: RasterImage,
    mask: ExclusionMask,
}

impl StreakScorer {
    pub fn new(image: &RasterImage, mask: ExclusionMask, sigma_px: f64) -> Self {
        assert_eq!(image.grid, mask.grid, "mask and image grids differ");
        StreakScorer {
            residual: high_pass(image, sigma_px).map(f64::abs),
            mask,
        }
    }

    /// `None` when fewer than [`MIN_SAMPLES`] samples are unmasked.
    pub fn score(&self, line: &Line) -> Option<f64> {
        let grid = self.residual.grid;
        let pitch = grid.pitch();
        let (theta, perp) = (line.theta(), line.theta_perp());
        let reach = grid.fov;
        let steps = (reach / pitch).ceil() as i64;
        let n = grid.n as f64;
        let mut sum = 0.0;
        let mut count = 0usize;
        for k in -steps..=steps {
            let p = line.s * theta + (k as f64 * pitch) * perp;
            if p.norm() > grid.fov {
                continue;
            }
            let (r, c) = grid.to_pixel(p);
            let (ri, ci) = (r.round().clamp(0.0, n - 1.0) as usize, c.round().clamp(0.0, n - 1.0) as usize);
            if self.mask.is_masked(ri, ci) {
                continue;
            }
            sum += self.residual.bilinear(r.clamp(0.0, n - 1.0), c.clamp(0.0, n - 1.0));
            count += 1;
        }
        (count >= MIN_SAMPLES).then(|| sum / count as f64)
    }

    pub fn residual(&self) -> &RasterImage {
        &self.residual
    }
}

/// One-off score of `line` on `image`.
pub fn streak_score(image: &RasterImage, line: &Line, mask: &ExclusionMask, sigma_px: f64) -> Option<f64> {
    StreakScorer::new(image, mask.clone(), sigma_px).score(line)
}
