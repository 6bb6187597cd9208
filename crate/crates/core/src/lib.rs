//! Simulation and analysis of metal streak artifacts in parallel-beam CT.
//!
//! The crate synthesizes polychromatic, scattered and noisy projections of
//! analytic phantoms, reconstructs them by filtered backprojection, predicts
//! which lines will carry streaks from the tangency geometry of the metal
//! boundary, measures streaks in reconstructions and applies two
//! sinogram-inpainting corrections.

pub mod artifact;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod mar;
pub mod pipeline;
pub mod radon;
pub mod spectral;
pub mod vec2;

pub use error::{Error, Result};
pub use grid::{ImageGrid, RasterImage, Sinogram, SinogramGrid};
pub use vec2::Vec2;
