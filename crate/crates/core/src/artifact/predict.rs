use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{enumerate_union_candidates, Phantom, StreakLine, StreakSource, Tolerances};
use crate::spectral::NoiseSpikes;

/// Physics behind the predicted streaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionMode {
    /// Lines tangent to the metal union at two or more points.
    BeamHardening,
    /// Lines tangent at two or more points to the union of all subdomains
    /// (every primitive except the hull), metal and non-metal alike.
    Scatter,
    /// One line per noise spike.
    Noise,
}

impl PredictionMode {
    pub fn name(&self) -> &'static str {
        match self {
            PredictionMode::BeamHardening => "beam-hardening",
            PredictionMode::Scatter => "scatter",
            PredictionMode::Noise => "noise",
        }
    }
}

impl fmt::Display for PredictionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PredictionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beam-hardening" => Ok(PredictionMode::BeamHardening),
            "scatter" => Ok(PredictionMode::Scatter),
            "noise" => Ok(PredictionMode::Noise),
            other => Err(Error::InvalidInput(format!(
                "unknown mode `{other}` (expected beam-hardening, scatter or noise)"
            ))),
        }
    }
}

/// Predicted streak lines for `phantom` under `mode`. `spikes` is required
/// in noise mode and ignored otherwise.
pub fn predict_streaks(phantom: &Phantom, mode: PredictionMode, spikes: Option<&NoiseSpikes>) -> Result<Vec<StreakLine>> {
    let tol = Tolerances::for_fov(phantom.fov);
    match mode {
        PredictionMode::BeamHardening => {
            let shapes = phantom.metal_shapes();
            if shapes.is_empty() {
                return Ok(Vec::new());
            }
            Ok(log_rejected(enumerate_union_candidates(&shapes, StreakSource::Geometry, &tol)))
        }
        PredictionMode::Scatter => {
            if phantom.hull.is_none() {
                return Err(Error::InvalidInput(
                    "scatter prediction needs a piecewise-constant phantom with a declared hull".into(),
                ));
            }
            let shapes = phantom.subdomain_shapes();
            if shapes.is_empty() {
                return Ok(Vec::new());
            }
            Ok(log_rejected(enumerate_union_candidates(&shapes, StreakSource::Scatter, &tol)))
        }
        PredictionMode::Noise => {
            let spikes = spikes.ok_or_else(|| Error::InvalidInput("noise prediction needs spikes".into()))?;
            Ok(spikes
                .spikes
                .iter()
                .map(|sp| StreakLine::bare(sp.line().canonical(), StreakSource::NoiseSpike))
                .collect())
        }
    }
}

fn log_rejected(set: crate::geometry::CandidateSet) -> Vec<StreakLine> {
    if set.rejected > 0 {
        log::info!("{} generated lines rejected by the tangency check", set.rejected);
    }
    set.lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::library;
    use crate::spectral::Spike;

    #[test]
    fn library_predictions() {
        let bh = PredictionMode::BeamHardening;
        assert!(predict_streaks(&library::single_metal_disk(), bh, None).unwrap().is_empty());
        assert_eq!(predict_streaks(&library::two_metal_disks(), bh, None).unwrap().len(), 4);
        assert_eq!(predict_streaks(&library::quarter_disk_metal(), bh, None).unwrap().len(), 2);
        assert!(predict_streaks(&library::metal_and_bone(), bh, None).unwrap().is_empty());
        // three disjoint disks: four bitangents per pair
        assert_eq!(
            predict_streaks(&library::metal_and_bone(), PredictionMode::Scatter, None).unwrap().len(),
            12
        );
    }

    #[test]
    fn noise_lines_follow_spikes() {
        let spikes = NoiseSpikes::new(vec![
            Spike { phi: -2.0, s: 0.1, c: 1.0 },
            Spike { phi: 0.5, s: -0.3, c: 1.0 },
        ])
        .unwrap();
        let lines = predict_streaks(&library::two_metal_disks(), PredictionMode::Noise, Some(&spikes)).unwrap();
        assert_eq!(lines.len(), 2);
        assert!((lines[0].line.phi - (std::f64::consts::PI - 2.0)).abs() < 1e-12);
        assert!((lines[0].line.s + 0.1).abs() < 1e-15);
    }
}
