use crate::error::{Error, Result};
use crate::geometry::Phantom;
use crate::grid::{Sinogram, SinogramGrid};
use crate::radon::{radon_hull, radon_phantom};

/// Constant scattered intensity `c` on `Q = {R chi_{D_0} > 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterModel {
    pub c: f64,
}

impl ScatterModel {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!("scatter constant c = {c} must be positive")));
        }
        if c >= 1.0 {
            log::warn!("scatter constant c = {c} exceeds the unattenuated beam intensity");
        }
        Ok(ScatterModel { c })
    }
}

/// `Q` as a 0/1 sinogram, from the phantom's declared hull `D_0`.
pub fn scatter_support(phantom: &Phantom, grid: SinogramGrid) -> Result<Sinogram> {
    Ok(radon_hull(phantom, grid)?.map(|v| if v > 0.0 { 1.0 } else { 0.0 }))
}

/// `P = -ln(exp(-R f_E0) + c chi_Q)`, evaluated as `Rf - ln(1 + c e^{Rf})`
/// on `Q`. The phantom must declare its hull.
pub fn scatter_project(phantom: &Phantom, model: &ScatterModel, grid: SinogramGrid) -> Result<Sinogram> {
    let model = ScatterModel::new(model.c)?;
    let q = scatter_support(phantom, grid).map_err(|_| {
        Error::InvalidInput(
            "scatter needs a piecewise-constant phantom with a declared hull D_0 (`hull` line)".into(),
        )
    })?;
    let rf = radon_phantom(phantom, grid)?;
    Ok(rf.zip_with(&q, |p, inq| {
        if inq > 0.0 {
            p - (model.c * p.exp()).ln_1p()
        } else {
            p
        }
    }))
}
