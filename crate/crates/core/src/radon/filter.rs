use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::grid::Sinogram;

/// Padded transform length used for rows of `n_s` samples.
pub fn padded_len(n_s: usize) -> usize {
    (2 * n_s).next_power_of_two()
}

/// Sampled ramp kernel `k(n h)` for the response `|omega|` band-limited to
/// the detector Nyquist frequency: `pi / (2 h^2)` at zero, `-2 / (pi n^2 h^2)`
/// at odd `n` and zero at even `n != 0`.
fn ramp_kernel(n: isize, h: f64) -> f64 {
    if n == 0 {
        PI / (2.0 * h * h)
    } else if n % 2 != 0 {
        -2.0 / (PI * (n * n) as f64 * h * h)
    } else {
        0.0
    }
}

/// Applies the ramp filter `|omega|` (radians per unit length) to every row.
///
/// Each row is convolved with the sampled band-limited ramp kernel. The
/// convolution runs through a transform of [`padded_len`] samples, long
/// enough that the kernel's reach covers the whole row without wraparound.
/// The left end value is subtracted first (the filter annihilates
/// constants), and the remainder is extended by repeating its end values
/// outward: the right end fills the first half of the pad and the left end,
/// now zero, the second half. Rows that vanish at both ends are simply
/// zero padded.
pub fn ramp_filter(sino: &Sinogram) -> Sinogram {
    let n_s = sino.grid.n_s;
    let n = padded_len(n_s);
    let h = sino.grid.h_s();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    // kernel spectrum, with the convolution step h and the 1/n of the inverse folded in
    let mut gain: Vec<Complex<f64>> = (0..n)
        .map(|k| {
            let m = if k <= n / 2 { k as isize } else { k as isize - n as isize };
            Complex::new(ramp_kernel(m, h) * h / n as f64, 0.0)
        })
        .collect();
    fft.process(&mut gain);
    let mut out = Sinogram::zeros(sino.grid);
    out.data
        .par_chunks_mut(n_s)
        .zip(sino.data.par_chunks(n_s))
        .for_each(|(dst, src)| {
            let base = src[0];
            let mut buf: Vec<Complex<f64>> = Vec::with_capacity(n);
            buf.extend(src.iter().map(|&v| Complex::new(v - base, 0.0)));
            let pad = n - n_s;
            let right = pad / 2;
            buf.extend(std::iter::repeat_n(Complex::new(src[n_s - 1] - base, 0.0), right));
            buf.extend(std::iter::repeat_n(Complex::new(0.0, 0.0), pad - right));
            fft.process(&mut buf);
            for (b, g) in buf.iter_mut().zip(&gain) {
                *b *= g.re;
            }
            ifft.process(&mut buf);
            for (d, b) in dst.iter_mut().zip(&buf) {
                *d = b.re;
            }
        });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SinogramGrid;

    #[test]
    fn constant_rows_vanish() {
        let g = SinogramGrid::new(2, 300, 1.0).unwrap();
        let s = Sinogram::from_fn(g, |_, _| 3.5);
        let f = ramp_filter(&s);
        assert!(f.max_abs() <= 1e-10 * 3.5, "{}", f.max_abs());
    }

    #[test]
    fn impulse_response_is_the_sampled_kernel() {
        let g = SinogramGrid::new(2, 65, 1.0).unwrap();
        let mut s = Sinogram::zeros(g);
        s.set(0, 32, 1.0);
        let f = ramp_filter(&s);
        let h = g.h_s();
        for j in 0..65 {
            let d = j as f64 - 32.0;
            let expected = if d == 0.0 {
                PI / (2.0 * h)
            } else if d.abs() % 2.0 == 1.0 {
                -2.0 / (PI * d * d * h)
            } else {
                0.0
            };
            assert!((f.get(0, j) - expected).abs() < 1e-9, "{j}: {} vs {expected}", f.get(0, j));
        }
    }

    #[test]
    fn kernel_spectrum_approaches_abs_omega() {
        // the discrete-time transform of the sampled kernel is |omega| up to
        // the truncation of its 1/n^2 tail
        let h = 0.01;
        let n = 4096isize;
        for w in [10.0, 50.0, 150.0] {
            let sum: f64 = (-n..=n).map(|m| ramp_kernel(m, h) * h * (w * m as f64 * h).cos()).sum();
            assert!((sum - w).abs() < 0.01 * w, "{w}: {sum}");
        }
    }
}
