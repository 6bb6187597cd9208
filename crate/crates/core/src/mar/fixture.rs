//! Synthetic sinogram with a background ridge crossing a metal trace.

use crate::error::Result;
use crate::grid::{Sinogram, SinogramGrid};
use crate::mar::trace::MetalTrace;

/// A smooth background plus a Gaussian ridge along `s = a sin(phi - phi0)`,
/// the sinogram of a small dense object off centre. A metal bias
/// `beta (1 - (s/r)^2)^2` is added on the centred band `|s| < r`, which is
/// also the trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeFixture {
    pub grid: SinogramGrid,
    pub ridge_offset: f64,
    pub ridge_phase: f64,
    pub ridge_width: f64,
    pub ridge_height: f64,
    pub trace_radius: f64,
    pub bias: f64,
}

impl Default for RidgeFixture {
    fn default() -> Self {
        RidgeFixture {
            grid: SinogramGrid::new(180, 128, 1.0).expect("static grid"),
            ridge_offset: 0.6,
            ridge_phase: 0.3,
            ridge_width: 0.04,
            ridge_height: 1.0,
            trace_radius: 0.3,
            bias: 1.0,
        }
    }
}

impl RidgeFixture {
    fn crest(&self, phi: f64) -> f64 {
        self.ridge_offset * (phi - self.ridge_phase).sin()
    }

    fn base(phi: f64, s: f64) -> f64 {
        1.0 + 0.3 * phi.cos() + 0.5 * (1.0 - s * s)
    }

    fn ridge(&self, phi: f64, s: f64) -> f64 {
        let d = (s - self.crest(phi)) / self.ridge_width;
        self.ridge_height * (-0.5 * d * d).exp()
    }

    /// Background plus ridge, with no metal.
    pub fn clean(&self) -> Sinogram {
        Sinogram::from_fn(self.grid, |phi, s| Self::base(phi, s) + self.ridge(phi, s))
    }

    /// Clean data plus the metal bias on the band.
    pub fn corrupted(&self) -> Sinogram {
        let r = self.trace_radius;
        Sinogram::from_fn(self.grid, |phi, s| {
            let u = s / r;
            let bias = if u.abs() < 1.0 { self.bias * (1.0 - u * u).powi(2) } else { 0.0 };
            Self::base(phi, s) + self.ridge(phi, s) + bias
        })
    }

    /// Every detector bin with `|s| < r`, the same at each angle.
    pub fn trace(&self) -> Result<MetalTrace> {
        let g = self.grid;
        let inside: Vec<usize> = (0..g.n_s).filter(|&j| g.s(j).abs() < self.trace_radius).collect();
        let row = vec![(inside[0], *inside.last().expect("band is non-empty"))];
        MetalTrace::from_intervals(g, vec![row; g.n_phi])
    }

    /// Mean ratio of the crest's prominence over its flanks, completed data
    /// against clean data, over angles whose crest lies well inside the
    /// trace. The flanks are sampled 2.5 ridge widths either side, so a
    /// smooth offset left by the completion does not count as crest.
    pub fn crest_retention(&self, completed: &Sinogram) -> f64 {
        let g = self.grid;
        let clean = self.clean();
        let flank = (2.5 * self.ridge_width / g.h_s()).round() as usize;
        let margin = self.trace_radius - 3.0 * self.ridge_width;
        let prominence = |sino: &Sinogram, i: usize, j: usize| {
            sino.get(i, j) - 0.5 * (sino.get(i, j - flank) + sino.get(i, j + flank))
        };
        let mut sum = 0.0;
        let mut n = 0usize;
        for i in 0..g.n_phi {
            let c = self.crest(g.phi(i));
            if c.abs() >= margin {
                continue;
            }
            let Some(j) = g.nearest_s_index(c) else { continue };
            sum += prominence(completed, i, j) / prominence(&clean, i, j);
            n += 1;
        }
        assert!(n > 0, "ridge never crosses the trace interior");
        sum / n as f64
    }
}
