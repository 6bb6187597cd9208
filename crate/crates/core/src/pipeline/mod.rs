//! Configuration-driven runs: phantom, projection, reconstruction,
//! prediction, scoring, MAR and a checksummed manifest.

mod config;
mod run;

pub use config::{MarMethod, PhantomSource, Physics, PipelineConfig, SpikeSpec};
pub use run::{project, run_pipeline, score_image, verify_manifest, MarOutcome, Projection, RunSummary, TOOL_VERSION};
