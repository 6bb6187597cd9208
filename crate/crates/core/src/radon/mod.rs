//! Forward projection, ramp filtering, backprojection and FBP.
//!
//! Normalization: the ramp filter multiplies by `|omega|` with `omega` in
//! radians per unit length, backprojection integrates over the full
//! rotation `(-pi, pi]`, and [`fbp`] divides by `4 pi`. With these
//! constants `fbp(radon(f)) ~ f`.

mod analytic;
mod backproject;
mod filter;
mod numeric;

pub use analytic::{radon_hull, radon_metal, radon_metal_weighted, radon_phantom, radon_shapes};
pub use backproject::{backproject, fbp};
pub use filter::{padded_len, ramp_filter};
pub use numeric::radon_numeric;
