//! Sampling grids and the two data containers: sinograms on a regular
//! `(phi, s)` grid and raster images on a square pixel grid.
//!
//! Conventions used throughout the crate:
//!
//! * A line is `L(phi, s) = { s*theta + t*theta_perp }` with
//!   `theta = (cos phi, sin phi)` and `theta_perp = (-sin phi, cos phi)`.
//! * Angles are sampled over the full rotation `(-pi, pi]`:
//!   `phi_i = -pi + (i + 1) * 2*pi / n_phi`, so the last sample is `pi`.
//! * Detector bins are node-centred: `s_j = -s_max + j * h_s` with
//!   `h_s = 2 * s_max / (n_s - 1)`.
//! * Pixels are cell-centred on `[-fov, fov]^2`. Column `c` sits at
//!   `x = -fov + (c + 1/2) * pitch`; row `r` sits at `y = fov - (r + 1/2) * pitch`
//!   so row 0 is the top of a rendered image.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// Regular `(phi, s)` sampling of the projection domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinogramGrid {
    pub n_phi: usize,
    pub n_s: usize,
    pub s_max: f64,
}

impl SinogramGrid {
    pub fn new(n_phi: usize, n_s: usize, s_max: f64) -> Result<Self> {
        let grid = SinogramGrid { n_phi, n_s, s_max };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_phi < 2 || self.n_s < 2 {
            return Err(Error::InvalidGrid(format!(
                "n_phi = {} and n_s = {} must both be >= 2",
                self.n_phi, self.n_s
            )));
        }
        if !(self.s_max.is_finite() && self.s_max > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "s_max = {} must be positive",
                self.s_max
            )));
        }
        Ok(())
    }

    /// Checks the containment rule `s_max >= fov * sqrt(2)`.
    pub fn check_covers_fov(&self, fov: f64) -> Result<()> {
        let need = fov * std::f64::consts::SQRT_2;
        if self.s_max < need * (1.0 - 1e-12) {
            return Err(Error::InvalidGrid(format!(
                "s_max = {} is below fov*sqrt(2) = {need}; the detector must contain the field of view",
                self.s_max
            )));
        }
        Ok(())
    }

    pub fn h_phi(&self) -> f64 {
        2.0 * PI / self.n_phi as f64
    }

    pub fn h_s(&self) -> f64 {
        2.0 * self.s_max / (self.n_s - 1) as f64
    }

    pub fn phi(&self, i: usize) -> f64 {
        -PI + (i + 1) as f64 * self.h_phi()
    }

    pub fn s(&self, j: usize) -> f64 {
        -self.s_max + j as f64 * self.h_s()
    }

    pub fn len(&self) -> usize {
        self.n_phi * self.n_s
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of the angle sample nearest to `phi` (taken modulo `2*pi`).
    pub fn nearest_phi_index(&self, phi: f64) -> usize {
        let u = (phi + PI) / self.h_phi() - 1.0;
        (u.round() as i64).rem_euclid(self.n_phi as i64) as usize
    }

    /// Index of the detector bin nearest to `s`, or `None` off the detector.
    pub fn nearest_s_index(&self, s: f64) -> Option<usize> {
        let u = ((s + self.s_max) / self.h_s()).round();
        if u < 0.0 || u > (self.n_s - 1) as f64 {
            None
        } else {
            Some(u as usize)
        }
    }
}

/// Values on a [`SinogramGrid`], angle-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    pub grid: SinogramGrid,
    pub data: Vec<f64>,
}

impl Sinogram {
    pub fn zeros(grid: SinogramGrid) -> Self {
        Sinogram {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn from_data(grid: SinogramGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "sinogram data has {} values, grid needs {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(Sinogram { grid, data })
    }

    /// Samples `f(phi, s)` at every node.
    pub fn from_fn(grid: SinogramGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for i in 0..grid.n_phi {
            let phi = grid.phi(i);
            for j in 0..grid.n_s {
                data.push(f(phi, grid.s(j)));
            }
        }
        Sinogram { grid, data }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.grid.n_s + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.grid.n_s + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.grid.n_s;
        &self.data[i * n..(i + 1) * n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let n = self.grid.n_s;
        &mut self.data[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> std::slice::Chunks<'_, f64> {
        self.data.chunks(self.grid.n_s)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Sinogram {
        Sinogram {
            grid: self.grid,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Sinogram, f: impl Fn(f64, f64) -> f64) -> Sinogram {
        assert_eq!(self.grid, other.grid, "sinogram grids differ");
        Sinogram {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Square pixel grid over `[-fov, fov]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageGrid {
    pub n: usize,
    pub fov: f64,
}

impl ImageGrid {
    pub fn new(n: usize, fov: f64) -> Result<Self> {
        let g = ImageGrid { n, fov };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidGrid(format!("image size n = {} must be >= 2", self.n)));
        }
        if !(self.fov.is_finite() && self.fov > 0.0) {
            return Err(Error::InvalidGrid(format!("fov = {} must be positive", self.fov)));
        }
        Ok(())
    }

    pub fn pitch(&self) -> f64 {
        2.0 * self.fov / self.n as f64
    }

    pub fn x(&self, col: usize) -> f64 {
        -self.fov + (col as f64 + 0.5) * self.pitch()
    }

    pub fn y(&self, row: usize) -> f64 {
        self.fov - (row as f64 + 0.5) * self.pitch()
    }

    pub fn center(&self, row: usize, col: usize) -> Vec2 {
        Vec2::new(self.x(col), self.y(row))
    }

    /// Fractional `(row, col)` coordinates of a point.
    pub fn to_pixel(&self, p: Vec2) -> (f64, f64) {
        let pitch = self.pitch();
        ((self.fov - p.y) / pitch - 0.5, (p.x + self.fov) / pitch - 0.5)
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Row-major image on an [`ImageGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    pub grid: ImageGrid,
    pub data: Vec<f64>,
}

impl RasterImage {
    pub fn zeros(grid: ImageGrid) -> Self {
        RasterImage {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn from_data(grid: ImageGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "image data has {} values, grid needs {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(RasterImage { grid, data })
    }

    /// Samples `f(point)` at every pixel centre.
    pub fn from_fn(grid: ImageGrid, f: impl Fn(Vec2) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for r in 0..grid.n {
            for c in 0..grid.n {
                data.push(f(grid.center(r, c)));
            }
        }
        RasterImage { grid, data }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.grid.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.data[row * self.grid.n + col] = v;
    }

    /// Bilinear interpolation at fractional pixel coordinates; zero outside.
    pub fn bilinear(&self, row: f64, col: f64) -> f64 {
        let n = self.grid.n as isize;
        let r0 = row.floor();
        let c0 = col.floor();
        let fr = row - r0;
        let fc = col - c0;
        let (r0, c0) = (r0 as isize, c0 as isize);
        let at = |r: isize, c: isize| -> f64 {
            if r < 0 || c < 0 || r >= n || c >= n {
                0.0
            } else {
                self.data[(r * n + c) as usize]
            }
        };
        (1.0 - fr) * ((1.0 - fc) * at(r0, c0) + fc * at(r0, c0 + 1))
            + fr * ((1.0 - fc) * at(r0 + 1, c0) + fc * at(r0 + 1, c0 + 1))
    }

    /// Bilinear value at a point in world coordinates.
    pub fn sample(&self, p: Vec2) -> f64 {
        let (r, c) = self.grid.to_pixel(p);
        self.bilinear(r, c)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RasterImage {
        RasterImage {
            grid: self.grid,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &RasterImage, f: impl Fn(f64, f64) -> f64) -> RasterImage {
        assert_eq!(self.grid, other.grid, "image grids differ");
        RasterImage {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
