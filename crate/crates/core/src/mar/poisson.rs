use crate::error::{Error, Result};
use crate::grid::Sinogram;
use crate::mar::trace::MetalTrace;

/// Quantile of `|laplacian|` used by [`mar_poisson`] when none is configured.
pub const DEFAULT_ZETA_QUANTILE: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonOptions {
    /// Stop once the residual norm drops below this fraction of the
    /// right-hand-side norm.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Keep only above-threshold curvature connected to structure outside
    /// the trace (see [`mar_poisson`]).
    pub link_to_exterior: bool,
}

impl Default for PoissonOptions {
    fn default() -> Self {
        PoissonOptions {
            rel_tol: 1e-10,
            max_iter: 20_000,
            link_to_exterior: true,
        }
    }
}

/// Completes the trace by solving `lap u = zeta(lap P)` with `u = P` outside.
///
/// The Laplacian is the 5-point stencil on the `(phi, s)` grid, periodic in
/// `phi`. `zeta` keeps the entries of the Laplacian of `P` inside the trace
/// whose magnitude reaches the `zeta_quantile` quantile and zeroes the rest.
/// With [`PoissonOptions::link_to_exterior`] set (the default), a kept entry
/// must also be linked to above-threshold structure outside the trace, so
/// edges of the background that cross the metal trace survive and the
/// curvature of the metal itself does not. A quantile of 0 keeps everything
/// and returns `P`; a quantile of 1 or more zeroes the right-hand side and
/// yields the discrete harmonic fill.
pub fn mar_poisson(p: &Sinogram, trace: &MetalTrace, zeta_quantile: f64) -> Result<Sinogram> {
    mar_poisson_with(p, trace, zeta_quantile, PoissonOptions::default())
}

pub fn mar_poisson_with(p: &Sinogram, trace: &MetalTrace, zeta_quantile: f64, opts: PoissonOptions) -> Result<Sinogram> {
    trace.validate()?;
    assert_eq!(p.grid, trace.grid, "sinogram and trace grids differ");
    if !(zeta_quantile >= 0.0) {
        return Err(Error::InvalidInput(format!("zeta quantile must be >= 0, got {zeta_quantile}")));
    }
    let g = p.grid;
    let (n_phi, n_s) = (g.n_phi, g.n_s);
    let mask = trace.mask();
    let cells: Vec<usize> = (0..mask.len()).filter(|&k| mask[k]).collect();
    if cells.is_empty() {
        return Ok(p.clone());
    }
    let mut index = vec![usize::MAX; mask.len()];
    for (u, &k) in cells.iter().enumerate() {
        index[k] = u;
    }

    let wp = 1.0 / (g.h_phi() * g.h_phi());
    let ws = 1.0 / (g.h_s() * g.h_s());
    let diag = 2.0 * (wp + ws);
    // trace cells never sit on the first or last detector bin, so s +- 1 is in range
    let neighbours = |k: usize| -> [(usize, f64); 4] {
        let [up, down, right, left] = stencil(n_phi, n_s, k);
        [(up, wp), (down, wp), (right, ws), (left, ws)]
    };
    let lap = |k: usize| neighbours(k).iter().map(|&(m, w)| w * p.data[m]).sum::<f64>() - diag * p.data[k];

    let zeta = if opts.link_to_exterior && zeta_quantile > 0.0 && zeta_quantile < 1.0 {
        linked_threshold(p, &mask, zeta_quantile)
    } else {
        let laplacian: Vec<f64> = cells.iter().map(|&k| lap(k)).collect();
        threshold(&laplacian, zeta_quantile)
    };

    // A = -lap restricted to the trace, which is symmetric positive definite.
    let mut b = vec![0.0; cells.len()];
    for (u, &k) in cells.iter().enumerate() {
        let mut acc = -zeta[u];
        for (m, w) in neighbours(k) {
            if !mask[m] {
                acc += w * p.data[m];
            }
        }
        b[u] = acc;
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for (u, &k) in cells.iter().enumerate() {
            let mut acc = diag * x[u];
            for (m, w) in neighbours(k) {
                if mask[m] {
                    acc -= w * x[index[m]];
                }
            }
            out[u] = acc;
        }
    };
    let x = conjugate_gradient(apply, &b, vec![0.0; cells.len()], diag, opts)?;

    let mut out = p.clone();
    for (u, &k) in cells.iter().enumerate() {
        out.data[k] = x[u];
    }
    Ok(out)
}

/// The four stencil neighbours of an interior detector bin: next angle,
/// previous angle, next bin, previous bin.
fn stencil(n_phi: usize, n_s: usize, k: usize) -> [usize; 4] {
    let (i, j) = (k / n_s, k % n_s);
    [((i + 1) % n_phi) * n_s + j, ((i + n_phi - 1) % n_phi) * n_s + j, k + 1, k - 1]
}

/// Quantile threshold restricted to structure that continues outside the
/// trace. The cut is the quantile of `|lap P|` over the trace; a trace entry
/// above the cut is kept only if it connects, through above-cut cells of the
/// whole sinogram, to an exterior cell whose stencil avoids the trace.
/// Metal-induced curvature lives entirely inside the trace and is dropped,
/// while a background edge crossing the trace is kept.
fn linked_threshold(p: &Sinogram, mask: &[bool], q: f64) -> Vec<f64> {
    let g = p.grid;
    let (n_phi, n_s) = (g.n_phi, g.n_s);
    let wp = 1.0 / (g.h_phi() * g.h_phi());
    let ws = 1.0 / (g.h_s() * g.h_s());
    let interior = |k: usize| {
        let j = k % n_s;
        j > 0 && j + 1 < n_s
    };
    let lap: Vec<f64> = (0..p.data.len())
        .map(|k| {
            if !interior(k) {
                return 0.0;
            }
            let [up, down, right, left] = stencil(n_phi, n_s, k);
            wp * (p.data[up] + p.data[down]) + ws * (p.data[right] + p.data[left]) - 2.0 * (wp + ws) * p.data[k]
        })
        .collect();
    let inside: Vec<f64> = (0..lap.len()).filter(|&k| mask[k]).map(|k| lap[k]).collect();
    let cut = {
        let mut mags: Vec<f64> = inside.iter().map(|v| v.abs()).collect();
        mags.sort_by(f64::total_cmp);
        mags[(q * (mags.len() - 1) as f64).floor() as usize]
    };
    let strong = |k: usize| interior(k) && lap[k].abs() >= cut;

    let mut reached = vec![false; lap.len()];
    let mut queue = std::collections::VecDeque::new();
    for k in 0..lap.len() {
        if !mask[k] && strong(k) && stencil(n_phi, n_s, k).iter().all(|&m| !mask[m]) {
            reached[k] = true;
            queue.push_back(k);
        }
    }
    while let Some(k) = queue.pop_front() {
        for m in stencil(n_phi, n_s, k) {
            if !reached[m] && strong(m) {
                reached[m] = true;
                queue.push_back(m);
            }
        }
    }
    (0..lap.len())
        .filter(|&k| mask[k])
        .map(|k| if reached[k] { lap[k] } else { 0.0 })
        .collect()
}

fn threshold(values: &[f64], q: f64) -> Vec<f64> {
    if q >= 1.0 {
        return vec![0.0; values.len()];
    }
    let mut mags: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let cut = mags[(q * (mags.len() - 1) as f64).floor() as usize];
    values.iter().map(|&v| if v.abs() >= cut { v } else { 0.0 }).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradient with sequential reductions.
fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    mut x: Vec<f64>,
    diag: f64,
    opts: PoissonOptions,
) -> Result<Vec<f64>> {
    let n = b.len();
    let b_norm = dot(b, b).sqrt();
    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let target = opts.rel_tol * b_norm.max(f64::MIN_POSITIVE);
    let mut r_norm = dot(&r, &r).sqrt();
    if r_norm <= target {
        return Ok(x);
    }
    let mut z: Vec<f64> = r.iter().map(|v| v / diag).collect();
    let mut d = z.clone();
    let mut rz = dot(&r, &z);
    let mut ad = vec![0.0; n];
    for iter in 1..=opts.max_iter {
        apply(&d, &mut ad);
        let alpha = rz / dot(&d, &ad);
        for k in 0..n {
            x[k] += alpha * d[k];
            r[k] -= alpha * ad[k];
        }
        r_norm = dot(&r, &r).sqrt();
        if r_norm <= target {
            log::debug!("poisson fill converged in {iter} iterations");
            return Ok(x);
        }
        for k in 0..n {
            z[k] = r[k] / diag;
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            d[k] = z[k] + beta * d[k];
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: r_norm / b_norm.max(f64::MIN_POSITIVE),
    })
}
