//! The metal-artifact image, streak prediction and streak measurement.

mod decompose;
mod predict;
mod report;
mod score;

pub use decompose::{fma_series, max_trace_argument, metal_artifact_image, ArtifactDecomposition};
pub use predict::{predict_streaks, PredictionMode};
pub use report::{validate_prediction, MeasuredLine, StreakReport, ValidationParams};
pub use score::{gaussian_blur, high_pass, streak_score, ExclusionMask, StreakScorer, MIN_SAMPLES};
