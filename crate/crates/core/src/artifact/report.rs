use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::artifact::score::StreakScorer;
use crate::error::{Error, Result};
use crate::geometry::{Line, StreakLine};

/// Settings for [`validate_prediction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationParams {
    pub n_controls: usize,
    pub seed: u64,
    /// A line is detected when its score is at least `theta` times the
    /// control median.
    pub theta: f64,
    /// Controls closer than this in angle (radians) ...
    pub exclude_phi: f64,
    /// ... and offset (pixels) to a predicted line are redrawn.
    pub exclude_px: f64,
}

impl Default for ValidationParams {
    fn default() -> Self {
        ValidationParams {
            n_controls: 200,
            seed: 0,
            theta: 2.0,
            exclude_phi: 0.02,
            exclude_px: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredLine {
    pub line: StreakLine,
    pub score: Option<f64>,
    pub ratio: Option<f64>,
    pub detected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreakReport {
    pub measured: Vec<MeasuredLine>,
    pub controls: Vec<(Line, f64)>,
    pub control_median: f64,
    pub params: ValidationParams,
}

impl StreakReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.measured.iter().filter_map(|m| m.ratio).collect()
    }

    /// Mean ratio over predicted lines with a defined score.
    pub fn mean_ratio(&self) -> Option<f64> {
        let r = self.ratios();
        (!r.is_empty()).then(|| r.iter().sum::<f64>() / r.len() as f64)
    }

    pub fn all_detected(&self) -> bool {
        self.measured.iter().all(|m| m.detected)
    }

    /// One row per predicted line, then one per control.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,phi_rad,s,span_dim,source,score,ratio,detected\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.9e}")).unwrap_or_else(|| "nan".into());
        for m in &self.measured {
            let _ = writeln!(
                out,
                "predicted,{:.15},{:.15},{},{},{},{},{}",
                m.line.line.phi,
                m.line.line.s,
                m.line.span_dim,
                m.line.source.name(),
                opt(m.score),
                opt(m.ratio),
                m.detected
            );
        }
        for (l, s) in &self.controls {
            let _ = writeln!(
                out,
                "control,{:.15},{:.15},,,{:.9e},{:.9e},",
                l.phi,
                l.s,
                s,
                s / self.control_median
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "predicted lines: {}", self.measured.len());
        let _ = writeln!(
            out,
            "controls: {} (seed {}), median score {:.6e}",
            self.controls.len(),
            self.params.seed,
            self.control_median
        );
        let _ = writeln!(out, "detection threshold: ratio >= {}", self.params.theta);
        for (k, m) in self.measured.iter().enumerate() {
            let ratio = m.ratio.map(|r| format!("{r:.3}")).unwrap_or_else(|| "undefined".into());
            let _ = writeln!(
                out,
                "  #{k}: phi = {:.6} rad, s = {:+.6}, {}, ratio {ratio} -> {}",
                m.line.line.phi,
                m.line.line.s,
                m.line.source.name(),
                if m.detected { "detected" } else { "not detected" }
            );
        }
        if let Some(mean) = self.mean_ratio() {
            let _ = writeln!(out, "mean predicted ratio: {mean:.3}");
        }
        out
    }
}

/// Scores the predicted lines and `n_controls` random lines on the image
/// behind `scorer`.
///
/// Controls are drawn uniformly with `phi` in `[0, pi)` and `s` in
/// `[-fov, fov]`, redrawn when they fall near a predicted line or have an
/// undefined score.
pub fn validate_prediction(
    scorer: &StreakScorer,
    predicted: &[StreakLine],
    params: ValidationParams,
) -> Result<StreakReport> {
    if params.n_controls < 50 {
        return Err(Error::InvalidInput(format!(
            "n_controls = {} but at least 50 control lines are required",
            params.n_controls
        )));
    }
    let grid = scorer.residual().grid;
    let near_px = params.exclude_px * grid.pitch();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut controls = Vec::with_capacity(params.n_controls);
    let mut attempts = 0usize;
    while controls.len() < params.n_controls {
        attempts += 1;
        if attempts > 1000 * params.n_controls {
            return Err(Error::InvalidInput("could not place control lines".into()));
        }
        let line = Line::new(rng.random_range(0.0..PI), rng.random_range(-grid.fov..=grid.fov));
        if predicted
            .iter()
            .any(|p| p.line.approx_eq(&line, params.exclude_phi, near_px))
        {
            continue;
        }
        if let Some(s) = scorer.score(&line) {
            controls.push((line, s));
        }
    }
    let mut sorted: Vec<f64> = controls.iter().map(|c| c.1).collect();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let control_median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    let measured = predicted
        .iter()
        .map(|p| {
            let score = scorer.score(&p.line);
            let ratio = score.map(|s| s / control_median);
            MeasuredLine {
                line: p.clone(),
                score,
                ratio,
                detected: ratio.is_some_and(|r| r >= params.theta),
            }
        })
        .collect();
    Ok(StreakReport {
        measured,
        controls,
        control_median,
        params,
    })
}
