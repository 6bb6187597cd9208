use crate::error::{Error, Result};
use crate::grid::{Sinogram, SinogramGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSource {
    /// Thresholded from the metal projection.
    Analytic,
    /// Supplied by the caller.
    Provided,
}

/// Per-angle sets of detector bins to be completed. Each interval is an
/// inclusive index range `(first, last)`; intervals are sorted, disjoint and
/// not adjacent, and leave at least one exterior bin on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct MetalTrace {
    pub grid: SinogramGrid,
    pub intervals: Vec<Vec<(usize, usize)>>,
    pub source: TraceSource,
}

impl MetalTrace {
    pub fn empty(grid: SinogramGrid) -> Self {
        MetalTrace {
            grid,
            intervals: vec![Vec::new(); grid.n_phi],
            source: TraceSource::Provided,
        }
    }

    pub fn from_intervals(grid: SinogramGrid, intervals: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        let t = MetalTrace {
            grid,
            intervals,
            source: TraceSource::Provided,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.intervals.len() != self.grid.n_phi {
            return Err(Error::InvalidInput(format!(
                "trace has {} angle rows, grid has {}",
                self.intervals.len(),
                self.grid.n_phi
            )));
        }
        for (i, row) in self.intervals.iter().enumerate() {
            let mut prev_end: Option<usize> = None;
            for &(a, b) in row {
                if a > b {
                    return Err(Error::InvalidInput(format!("angle {i}: empty interval ({a}, {b})")));
                }
                if a == 0 || b + 1 >= self.grid.n_s {
                    return Err(Error::TraceTouchesBoundary(i));
                }
                if prev_end.is_some_and(|e| a <= e + 1) {
                    return Err(Error::InvalidInput(format!("angle {i}: intervals overlap or touch")));
                }
                prev_end = Some(b);
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.iter().all(|r| r.is_empty())
    }

    /// Number of bins inside the trace.
    pub fn len(&self) -> usize {
        self.intervals
            .iter()
            .flat_map(|r| r.iter().map(|(a, b)| b - a + 1))
            .sum()
    }

    /// Angle-major membership flags.
    pub fn mask(&self) -> Vec<bool> {
        let n_s = self.grid.n_s;
        let mut m = vec![false; self.grid.len()];
        for (i, row) in self.intervals.iter().enumerate() {
            for &(a, b) in row {
                m[i * n_s + a..=i * n_s + b].iter_mut().for_each(|v| *v = true);
            }
        }
        m
    }
}

/// Bins where `R chi_D > tau_m`, grown by one bin on each side.
/// The default threshold is half a detector spacing.
pub fn metal_trace(metal_sino: &Sinogram, tau_m: Option<f64>) -> Result<MetalTrace> {
    let grid = metal_sino.grid;
    let tau = tau_m.unwrap_or(0.5 * grid.h_s());
    if let Some(v) = metal_sino.data.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidInput(format!("metal projection must be nonnegative, found {v}")));
    }
    let n_s = grid.n_s;
    let mut intervals = Vec::with_capacity(grid.n_phi);
    for (i, row) in metal_sino.rows().enumerate() {
        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut j = 0;
        while j < n_s {
            if row[j] > tau {
                let start = j;
                while j + 1 < n_s && row[j + 1] > tau {
                    j += 1;
                }
                if start == 0 || j == n_s - 1 {
                    return Err(Error::TraceTouchesBoundary(i));
                }
                let (a, b) = (start - 1, j + 1);
                match runs.last_mut() {
                    Some(last) if a <= last.1 + 1 => last.1 = b,
                    _ => runs.push((a, b)),
                }
            }
            j += 1;
        }
        intervals.push(runs);
    }
    let trace = MetalTrace {
        grid,
        intervals,
        source: TraceSource::Analytic,
    };
    trace.validate()?;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{library, Shape};
    use crate::radon::{radon_metal, radon_shapes};

    #[test]
    fn no_metal_no_trace() {
        let g = SinogramGrid::new(8, 33, 1.5).unwrap();
        assert!(metal_trace(&Sinogram::zeros(g), None).unwrap().is_empty());
    }

    #[test]
    fn centred_disk_gives_centred_interval() {
        let g = SinogramGrid::new(36, 257, 1.5).unwrap();
        let d = Shape::disk(0.0, 0.0, 0.2);
        let t = metal_trace(&radon_shapes(&[(&d, 1.0)], g).unwrap(), None).unwrap();
        for row in &t.intervals {
            assert_eq!(row.len(), 1);
            let (a, b) = row[0];
            let width = (b - a) as f64 * g.h_s();
            assert!((width - 0.4).abs() <= 2.0 * g.h_s(), "{width}");
            assert!((g.s(a) + g.s(b)).abs() <= 2.0 * g.h_s());
        }
    }

    #[test]
    fn two_disks_split_and_merge() {
        let g = SinogramGrid::new(180, 257, 1.5).unwrap();
        let t = metal_trace(&radon_metal(&library::two_metal_disks(), g).unwrap(), None).unwrap();
        let counts: Vec<usize> = t.intervals.iter().map(|r| r.len()).collect();
        assert!(counts.contains(&2));
        assert!(counts.contains(&1));
    }

    #[test]
    fn boundary_contact_is_rejected() {
        let g = SinogramGrid::new(4, 9, 1.0).unwrap();
        let s = Sinogram::from_fn(g, |_, s| if s < -0.7 { 1.0 } else { 0.0 });
        assert!(matches!(metal_trace(&s, None), Err(Error::TraceTouchesBoundary(_))));
    }
}
