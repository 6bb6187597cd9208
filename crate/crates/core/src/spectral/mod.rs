//! Projection data under non-ideal physics: polychromatic beam hardening,
//! constant scatter and impulsive noise.

mod noise;
mod project;
mod scatter;
mod spectrum;
mod trace;

pub use noise::{add_spikes, noisy_project, NoiseSpikes, Spike, SpikeLaw};
pub use project::{monochromatic_project, polychromatic_project, polychromatic_project_general};
pub use scatter::{scatter_project, scatter_support, ScatterModel};
pub use spectrum::{Spectrum, SpectrumModel};
pub use trace::{beam_hardening_trace, ln_sinhc};
