use crate::error::{Error, Result};

/// Energy weighting of the source over `[E0 - delta, E0 + delta]`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumModel {
    /// Flat density `1 / (2 delta)`.
    Uniform,
    /// Discrete bins `(E_i, w_i)`, where `w_i = eta_i * dE` and the weights sum to one.
    Binned(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub e0: f64,
    pub delta: f64,
    pub model: SpectrumModel,
}

impl Spectrum {
    pub fn monochromatic(e0: f64) -> Self {
        Spectrum {
            e0,
            delta: 0.0,
            model: SpectrumModel::Uniform,
        }
    }

    pub fn uniform(e0: f64, delta: f64) -> Result<Self> {
        let s = Spectrum {
            e0,
            delta,
            model: SpectrumModel::Uniform,
        };
        s.validate()?;
        Ok(s)
    }

    /// Arbitrary bins; `delta` is taken as the largest `|E_i - E0|`.
    pub fn binned(e0: f64, bins: Vec<(f64, f64)>) -> Result<Self> {
        let delta = bins.iter().fold(0.0, |m: f64, (e, _)| m.max((e - e0).abs()));
        let s = Spectrum {
            e0,
            delta,
            model: SpectrumModel::Binned(bins),
        };
        s.validate()?;
        Ok(s)
    }

    /// `n` equal-weight bins at the midpoints of a uniform partition of
    /// `[E0 - delta, E0 + delta]`: the midpoint rule for the uniform spectrum.
    pub fn uniform_bins(e0: f64, delta: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpectrum("bin count must be positive".into()));
        }
        let width = 2.0 * delta / n as f64;
        let bins = (0..n)
            .map(|i| (e0 - delta + (i as f64 + 0.5) * width, 1.0 / n as f64))
            .collect();
        let s = Spectrum {
            e0,
            delta,
            model: SpectrumModel::Binned(bins),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn is_monochromatic(&self) -> bool {
        self.delta == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e0.is_finite() && self.e0 > 0.0) {
            return Err(Error::InvalidSpectrum(format!("E0 = {} must be positive", self.e0)));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::InvalidSpectrum(format!("delta = {} must be nonnegative", self.delta)));
        }
        if let SpectrumModel::Binned(bins) = &self.model {
            if bins.is_empty() {
                return Err(Error::InvalidSpectrum("no bins".into()));
            }
            let mut total = 0.0;
            for &(e, w) in bins {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(Error::InvalidSpectrum(format!("bin at E = {e} has weight {w} <= 0")));
                }
                if !e.is_finite() {
                    return Err(Error::InvalidSpectrum("non-finite bin energy".into()));
                }
                total += w;
            }
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidSpectrum(format!("bin weights sum to {total}, not 1")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Spectrum::uniform(0.06, 0.02).is_ok());
        assert!(Spectrum::uniform(0.06, -0.02).is_err());
        assert!(Spectrum::binned(0.06, vec![(0.05, 0.5), (0.07, 0.4)]).is_err());
        assert!(Spectrum::binned(0.06, vec![(0.05, 1.1), (0.07, -0.1)]).is_err());
        let b = Spectrum::uniform_bins(0.06, 0.02, 101).unwrap();
        assert!((b.delta - 0.02).abs() < 1e-15);
        assert!(Spectrum::monochromatic(0.06).is_monochromatic());
    }
}
