//! Parallel-beam Radon transform on the centered unit square, its exact
//! matrix-transpose adjoint, and the per-angle Fourier construction of Radon
//! vaguelettes.
//!
//! Geometry: `m` angles uniform on [0,π), `2m` signed offsets uniform on
//! [−√2/2, √2/2] (the circumscribed radius of the square), rays traced with
//! Joseph (driving-axis linear interpolation) weights.

use rustfft::num_complex::Complex64;

use super::fourier;
use crate::wavelets::{WaveletBasis, WaveletIndex};

pub struct RadonGeometry {
    pub m: usize,
    pub n_angles: usize,
    pub n_offsets: usize,
    pub d_angle: f64,
    pub d_offset: f64,
}

impl RadonGeometry {
    pub fn new(m: usize) -> Self {
        let n_angles = m;
        let n_offsets = 2 * m;
        RadonGeometry {
            m,
            n_angles,
            n_offsets,
            d_angle: std::f64::consts::PI / n_angles as f64,
            d_offset: std::f64::consts::SQRT_2 / n_offsets as f64,
        }
    }

    pub fn angle(&self, t: usize) -> f64 {
        t as f64 * self.d_angle
    }

    pub fn offset(&self, s: usize) -> f64 {
        -std::f64::consts::SQRT_2 / 2.0 + (s as f64 + 0.5) * self.d_offset
    }

    /// Sinogram cell measure Δr·Δθ.
    pub fn cell_measure(&self) -> f64 {
        self.d_offset * self.d_angle
    }
}

/// Visits the Joseph interpolation stencil of one ray: calls
/// `visit(cell_index, weight)` so that `Σ weight·g[cell] ≈ ∫_ray g`.
fn trace_ray<F: FnMut(usize, f64)>(m: usize, theta: f64, r: f64, mut visit: F) {
    let h = 1.0 / m as f64;
    let (sin, cos) = theta.sin_cos();
    // Ray: { x : x·(cos,sin) = r }, direction (−sin, cos); march along the
    // axis where the direction is largest.
    if sin.abs() >= cos.abs() {
        // March over x-planes (axis 0); step length per plane: h/|sin|.
        let step = h / sin.abs();
        for ix in 0..m {
            // Image cell i sits at i·h − 1/2: the wavelet-transform position
            // convention (index i ↔ i·h on [0,1]) shifted to the centered
            // scanner frame.
            let x = ix as f64 * h - 0.5;
            let y = (r - x * cos) / sin; // in [−0.5, 0.5] when inside
            let fy = (y + 0.5) / h;
            let iy0 = fy.floor();
            let frac = fy - iy0;
            let iy0 = iy0 as i64;
            for (iy, w) in [(iy0, 1.0 - frac), (iy0 + 1, frac)] {
                if iy >= 0 && (iy as usize) < m && w != 0.0 {
                    visit(ix * m + iy as usize, w * step);
                }
            }
        }
    } else {
        let step = h / cos.abs();
        for iy in 0..m {
            let y = iy as f64 * h - 0.5;
            let x = (r - y * sin) / cos;
            let fx = (x + 0.5) / h;
            let ix0 = fx.floor();
            let frac = fx - ix0;
            let ix0 = ix0 as i64;
            for (ix, w) in [(ix0, 1.0 - frac), (ix0 + 1, frac)] {
                if ix >= 0 && (ix as usize) < m && w != 0.0 {
                    visit(ix as usize * m + iy as usize, w * step);
                }
            }
        }
    }
}

/// Forward projection of an `m × m` image (row-major) to the sinogram,
/// laid out angle-major: `sino[t * 2m + s]`.
pub fn forward(values: &[f64], m: usize) -> Vec<f64> {
    let geo = RadonGeometry::new(m);
    let mut sino = vec![0.0; geo.n_angles * geo.n_offsets];
    for t in 0..geo.n_angles {
        let theta = geo.angle(t);
        for s in 0..geo.n_offsets {
            let mut acc = 0.0;
            trace_ray(m, theta, geo.offset(s), |cell, w| acc += w * values[cell]);
            sino[t * geo.n_offsets + s] = acc;
        }
    }
    sino
}

/// Adjoint w.r.t. the quadrature inner products (Δr·Δθ on the sinogram,
/// h² on the image): scaled transpose of the forward stencil.
pub fn adjoint(sino: &[f64], m: usize) -> Vec<f64> {
    let geo = RadonGeometry::new(m);
    let h2 = 1.0 / (m * m) as f64;
    let scale = geo.cell_measure() / h2;
    let mut img = vec![0.0; m * m];
    for t in 0..geo.n_angles {
        let theta = geo.angle(t);
        for s in 0..geo.n_offsets {
            let v = sino[t * geo.n_offsets + s];
            if v != 0.0 {
                trace_ray(m, theta, geo.offset(s), |cell, w| img[cell] += scale * w * v);
            }
        }
    }
    img
}

/// Sinogram samples of the vaguelette u_{j,k,e}: per angle θ the offset
/// profile has 1-D Fourier transform `(|σ|/2π)·κ_j·ψ̂_{j,k,e}(σ·ω_θ)`, which
/// inverts R* exactly against the polar decomposition of the backprojection.
pub fn vaguelette_sinogram(
    basis: &WaveletBasis,
    idx: &WaveletIndex,
    m: usize,
    kappa_j: f64,
) -> Vec<f64> {
    let geo = RadonGeometry::new(m);
    let nr = geo.n_offsets;
    let dr = geo.d_offset;
    let r0 = geo.offset(0);
    let scale_j = (2f64).powi(-(idx.j as i32)); // 2^{−j} for d = 2 tensor
    let mut sino = vec![0.0; geo.n_angles * nr];
    let mut line = vec![Complex64::default(); nr];
    for t in 0..geo.n_angles {
        let theta = geo.angle(t);
        let (sin, cos) = theta.sin_cos();
        for (kk, v) in line.iter_mut().enumerate() {
            let sigma = fourier::bin_frequency(kk, nr, dr);
            // Wavelet positions live on [0,1]²; in the centered scanner
            // frame the wavelet sits at k·2^{−j} − 1/2.
            let xi = [sigma * cos, sigma * sin];
            let shift = 2f64.powi(-(idx.j as i32));
            let center = [
                idx.k[0] as f64 * shift - 0.5,
                idx.k[1] as f64 * shift - 0.5,
            ];
            let phase = Complex64::new(0.0, -(xi[0] * center[0] + xi[1] * center[1])).exp();
            let psi_hat =
                scale_j * phase * basis.tensor_fourier(idx.e, &[xi[0] * shift, xi[1] * shift]);
            let ramp = sigma.abs() / (2.0 * std::f64::consts::PI);
            // Sampled inverse transform needs the grid phase e^{iσ r0}.
            *v = kappa_j * ramp * psi_hat * Complex64::new(0.0, sigma * r0).exp();
        }
        fourier::fft_1d(&mut line, true);
        for s in 0..nr {
            sino[t * nr + s] = line[s].re / dr;
        }
    }
    sino
}
