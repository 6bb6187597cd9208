use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::geometry::Line;
use crate::geometry::Phantom;
use crate::grid::{Sinogram, SinogramGrid};
use crate::radon::radon_phantom;

/// An impulse of intensity `c` at the projection-space point `(phi, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spike {
    pub phi: f64,
    pub s: f64,
    pub c: f64,
}

impl Spike {
    pub fn line(&self) -> Line {
        Line::new(self.phi, self.s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpikes {
    pub spikes: Vec<Spike>,
    /// Seed used when the spikes were drawn at random.
    pub seed: Option<u64>,
}

/// Parameters for drawing random spikes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeLaw {
    pub count: usize,
    /// Poisson rate of the amplitude count.
    pub lambda: f64,
    /// Intensity per count.
    pub gain: f64,
    /// Spikes are placed on detector nodes with `|s| <= s_limit`.
    pub s_limit: f64,
}

impl NoiseSpikes {
    pub fn new(spikes: Vec<Spike>) -> Result<Self> {
        for sp in &spikes {
            if !(sp.c > 0.0 && sp.c.is_finite() && sp.phi.is_finite() && sp.s.is_finite()) {
                return Err(Error::InvalidInput(format!("invalid spike {sp:?}: c must be positive")));
            }
        }
        Ok(NoiseSpikes { spikes, seed: None })
    }

    /// Draws spikes on distinct grid nodes naming distinct lines. Amplitudes
    /// are `gain * k` with `k ~ Poisson(lambda)` redrawn until `k >= 1`.
    pub fn generate(grid: SinogramGrid, law: SpikeLaw, seed: u64) -> Result<Self> {
        grid.validate()?;
        let poisson = Poisson::new(law.lambda)
            .map_err(|e| Error::InvalidInput(format!("Poisson rate {}: {e}", law.lambda)))?;
        if !(law.gain > 0.0 && law.gain.is_finite()) {
            return Err(Error::InvalidInput(format!("spike gain {} must be positive", law.gain)));
        }
        let nodes: Vec<usize> = (0..grid.n_s).filter(|&j| grid.s(j).abs() <= law.s_limit).collect();
        if law.count > 0 && law.count * 2 > nodes.len() * grid.n_phi {
            return Err(Error::InvalidInput(format!(
                "cannot place {} distinct spikes within |s| <= {}",
                law.count, law.s_limit
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spikes: Vec<Spike> = Vec::with_capacity(law.count);
        while spikes.len() < law.count {
            let i = rng.random_range(0..grid.n_phi);
            let j = nodes[rng.random_range(0..nodes.len())];
            let line = Line::new(grid.phi(i), grid.s(j));
            if spikes
                .iter()
                .any(|sp| sp.line().approx_eq(&line, 0.5 * grid.h_phi(), 0.5 * grid.h_s()))
            {
                continue;
            }
            let k = loop {
                let k: f64 = poisson.sample(&mut rng);
                if k >= 1.0 {
                    break k;
                }
            };
            spikes.push(Spike {
                phi: line.phi,
                s: line.s,
                c: law.gain * k,
            });
        }
        Ok(NoiseSpikes {
            spikes,
            seed: Some(seed),
        })
    }

    /// Grid node of every spike; errors if one is off the detector or two
    /// share a node.
    pub fn nodes(&self, grid: SinogramGrid) -> Result<Vec<(usize, usize)>> {
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(self.spikes.len());
        for sp in &self.spikes {
            let i = grid.nearest_phi_index(sp.phi);
            let j = grid.nearest_s_index(sp.s).ok_or_else(|| {
                Error::InvalidInput(format!("spike at s = {} lies off the detector", sp.s))
            })?;
            if out.contains(&(i, j)) {
                return Err(Error::SpikeCollision {
                    phi_index: i,
                    s_index: j,
                });
            }
            out.push((i, j));
        }
        Ok(out)
    }
}

/// `P = -ln(exp(-R f_E0) + sum_k c_k delta_k)`, where each Dirac becomes a
/// single-node impulse of mass `c_k / (h_phi h_s)`.
pub fn noisy_project(phantom: &Phantom, spikes: &NoiseSpikes, grid: SinogramGrid) -> Result<Sinogram> {
    let mut p = radon_phantom(phantom, grid)?;
    add_spikes(&mut p, spikes)?;
    Ok(p)
}

/// Applies the spike impulses to existing projection data in place.
pub fn add_spikes(p: &mut Sinogram, spikes: &NoiseSpikes) -> Result<()> {
    let grid = p.grid;
    let cell = grid.h_phi() * grid.h_s();
    for ((i, j), sp) in spikes.nodes(grid)?.into_iter().zip(&spikes.spikes) {
        let v = p.get(i, j);
        p.set(i, j, v - (sp.c / cell * v.exp()).ln_1p());
    }
    Ok(())
}
