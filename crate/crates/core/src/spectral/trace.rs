use crate::error::{Error, Result};
use crate::grid::Sinogram;

/// `g(x) = ln(sinh(x) / x)`, with `g(0) = 0`.
///
/// Small arguments use the Taylor series, moderate ones `ln_1p` of the
/// series of `sinh(x)/x - 1`, and `|x| > 700` the asymptotic form
/// `|x| - ln(2|x|) + ln(1 - e^{-2|x|})`, which cannot overflow.
pub fn ln_sinhc(x: f64) -> f64 {
    let a = x.abs();
    if a < 1e-4 {
        let x2 = a * a;
        x2 / 6.0 - x2 * x2 / 180.0
    } else if a < 1.0 {
        let x2 = a * a;
        let mut term = 1.0;
        let mut sum = 0.0;
        let mut n = 1.0;
        loop {
            term *= x2 / ((2.0 * n) * (2.0 * n + 1.0));
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
            n += 1.0;
        }
        sum.ln_1p()
    } else if a <= 700.0 {
        (a.sinh() / a).ln()
    } else {
        a - (2.0 * a).ln() + (-(-2.0 * a).exp()).ln_1p()
    }
}

/// Pointwise `g(alpha_delta * R chi_D)`.
pub fn beam_hardening_trace(metal_sino: &Sinogram, alpha_delta: f64) -> Result<Sinogram> {
    if !alpha_delta.is_finite() || alpha_delta == 0.0 {
        return Err(Error::InvalidSpectrum(format!(
            "alpha * delta = {alpha_delta} must be finite and nonzero"
        )));
    }
    if let Some(v) = metal_sino.data.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "metal projection must be nonnegative, found {v}"
        )));
    }
    Ok(metal_sino.map(|v| ln_sinhc(alpha_delta * v)))
}
