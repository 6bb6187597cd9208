use crate::error::Result;
use crate::grid::Sinogram;
use crate::mar::trace::MetalTrace;

/// Replaces every trace interval by the straight line joining its two
/// exterior neighbours.
pub fn mar_linear(p: &Sinogram, trace: &MetalTrace) -> Result<Sinogram> {
    trace.validate()?;
    assert_eq!(p.grid, trace.grid, "sinogram and trace grids differ");
    let mut out = p.clone();
    for (i, row) in trace.intervals.iter().enumerate() {
        let src = p.row(i);
        let dst = out.row_mut(i);
        for &(a, b) in row {
            let (l, r) = (a - 1, b + 1);
            let (vl, vr) = (src[l], src[r]);
            let span = (r - l) as f64;
            for (j, v) in dst.iter_mut().enumerate().take(b + 1).skip(a) {
                let w = (j - l) as f64 / span;
                *v = (1.0 - w) * vl + w * vr;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SinogramGrid;

    fn setup() -> (Sinogram, MetalTrace) {
        let g = SinogramGrid::new(3, 12, 1.0).unwrap();
        let p = Sinogram::from_fn(g, |phi, s| 2.0 * s + phi + if s.abs() < 0.3 { 5.0 } else { 0.0 });
        let t = MetalTrace::from_intervals(g, vec![vec![(3, 8)], vec![], vec![(1, 2), (4, 9)]]).unwrap();
        (p, t)
    }

    #[test]
    fn empty_trace_is_identity() {
        let (p, _) = setup();
        assert_eq!(mar_linear(&p, &MetalTrace::empty(p.grid)).unwrap(), p);
    }

    #[test]
    fn affine_rows_are_reproduced() {
        let g = SinogramGrid::new(3, 12, 1.0).unwrap();
        let p = Sinogram::from_fn(g, |phi, s| 2.0 * s - phi);
        let (_, t) = setup();
        let out = mar_linear(&p, &t).unwrap();
        for k in 0..p.data.len() {
            assert!((out.data[k] - p.data[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn outside_untouched_and_idempotent() {
        let (p, t) = setup();
        let once = mar_linear(&p, &t).unwrap();
        let mask = t.mask();
        for k in 0..p.data.len() {
            if !mask[k] {
                assert_eq!(once.data[k].to_bits(), p.data[k].to_bits());
            }
        }
        assert_eq!(mar_linear(&once, &t).unwrap(), once);
    }
}
