//! Sinogram-domain metal artifact reduction: trace extraction, linear
//! interpolation and Poisson completion.

mod fixture;
mod linear;
mod poisson;
mod trace;

pub use fixture::RidgeFixture;
pub use linear::mar_linear;
pub use poisson::{mar_poisson, mar_poisson_with, PoissonOptions, DEFAULT_ZETA_QUANTILE};
pub use trace::{metal_trace, MetalTrace, TraceSource};
