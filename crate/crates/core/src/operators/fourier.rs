//! FFT plumbing shared by the convolution operator and the vaguelette
//! constructions: padded-window embedding, Fourier multipliers, and sampled
//! continuum wavelet transforms on the DFT frequency grid.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place complex FFT; the inverse carries the 1/N factor.
pub fn fft_1d(data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(data.len())
    } else {
        planner.plan_fft_forward(data.len())
    };
    fft.process(data);
    if inverse {
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// In-place 2-D FFT of an `n × n` row-major array.
pub fn fft_2d(data: &mut [Complex64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::default(); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
    if inverse {
        let scale = 1.0 / (n * n) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// Signed frequency of DFT bin `k` on `n` samples with spacing `h`.
pub fn bin_frequency(k: usize, n: usize, h: f64) -> f64 {
    let signed = if k <= n / 2 { k as isize } else { k as isize - n as isize };
    2.0 * std::f64::consts::PI * signed as f64 / (n as f64 * h)
}

/// Embeds `m^d` signal samples into the centered `(factor·m)^d` padded
/// window; padded index `i` sits at position `(i − off)·h` with
/// `off = m(factor−1)/2`, so signal index `i` keeps position `i·h`.
pub fn embed(values: &[f64], d: usize, m: usize, factor: usize) -> Vec<Complex64> {
    let n = factor * m;
    let off = m * (factor - 1) / 2;
    let mut out = vec![Complex64::default(); n.pow(d as u32)];
    match d {
        1 => {
            for i in 0..m {
                out[off + i] = Complex64::new(values[i], 0.0);
            }
        }
        _ => {
            for i in 0..m {
                for j in 0..m {
                    out[(off + i) * n + (off + j)] = Complex64::new(values[i * m + j], 0.0);
                }
            }
        }
    }
    out
}

/// Restriction of a padded-window array back to the signal cells.
pub fn restrict(padded: &[Complex64], d: usize, m: usize, factor: usize) -> Vec<f64> {
    let n = factor * m;
    let off = m * (factor - 1) / 2;
    let mut out = vec![0.0; m.pow(d as u32)];
    match d {
        1 => {
            for i in 0..m {
                out[i] = padded[off + i].re;
            }
        }
        _ => {
            for i in 0..m {
                for j in 0..m {
                    out[i * m + j] = padded[(off + i) * n + (off + j)].re;
                }
            }
        }
    }
    out
}

/// Applies `f(|ξ|²)` per bin on the padded frequency grid of `(factor·m)^d`
/// bins with spacing `h = 1/m`.
pub fn apply_multiplier<F: FnMut(f64) -> f64>(
    data: &mut [Complex64],
    d: usize,
    m: usize,
    factor: usize,
    mut mult: F,
) {
    let n = factor * m;
    let h = 1.0 / m as f64;
    match d {
        1 => {
            for (k, v) in data.iter_mut().enumerate() {
                let xi = bin_frequency(k, n, h);
                *v *= mult(xi * xi);
            }
        }
        _ => {
            for kx in 0..n {
                let xix = bin_frequency(kx, n, h);
                for ky in 0..n {
                    let xiy = bin_frequency(ky, n, h);
                    data[kx * n + ky] *= mult(xix * xix + xiy * xiy);
                }
            }
        }
    }
}

/// Visits every padded-grid bin with its frequency vector.
pub fn for_each_bin<F: FnMut(usize, [f64; 2])>(d: usize, m: usize, factor: usize, mut f: F) {
    let n = factor * m;
    let h = 1.0 / m as f64;
    match d {
        1 => {
            for k in 0..n {
                f(k, [bin_frequency(k, n, h), 0.0]);
            }
        }
        _ => {
            for kx in 0..n {
                let xix = bin_frequency(kx, n, h);
                for ky in 0..n {
                    f(kx * n + ky, [xix, bin_frequency(ky, n, h)]);
                }
            }
        }
    }
}
