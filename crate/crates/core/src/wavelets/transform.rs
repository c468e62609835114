//! Non-periodic (zero-extension) discrete wavelet transform on dyadic grids.
//!
//! The signal on `[0,1]^d` is embedded in ℓ2(Z^d) by zero extension and run
//! through the orthonormal Daubechies filter bank. Every coefficient whose
//! support can overlap the unit cube is kept, so bands at level `j` cover
//! positions `k ∈ [−(2R−2), 2^j−1]` per axis and the transform is an exact
//! isometry: no periodization, no boundary filters.
//!
//! The forward map scales input samples by `h^{d/2}`, making coefficients
//! quadrature approximations of the continuum inner products `⟨ψ_{j,k,e}, g⟩`
//! and Parseval hold in the discrete `L2([0,1]^d)` norm.

use super::{WaveletBasis, WaveletIndex};
use crate::{Error, Result};

/// Band bookkeeping: level, type, per-axis position range and the offset of
/// the band's values inside the flat coefficient vector.
#[derive(Debug, Clone)]
pub struct BandInfo {
    pub j: usize,
    pub e: [u8; 2],
    /// Smallest position per axis (both axes share the range).
    pub lo: i64,
    /// Positions per axis.
    pub len: usize,
    pub offset: usize,
}

/// Precomputed transform plan for a fixed `(basis, m, max detail level)`.
#[derive(Debug, Clone)]
pub struct DwtLayout {
    d: usize,
    m: usize,
    /// log2 m: the finest pyramid level.
    k_levels: usize,
    /// Deepest detail level stored (≤ k_levels − 1).
    jd_max: usize,
    h: Vec<f64>,
    g: Vec<f64>,
    bands: Vec<BandInfo>,
    total: usize,
}

/// Mother-type vectors at a detail level, in canonical order.
fn mother_types(d: usize) -> &'static [[u8; 2]] {
    match d {
        1 => &[[1, 0]],
        _ => &[[0, 1], [1, 0], [1, 1]],
    }
}

impl DwtLayout {
    /// Plans a transform of `m^d` samples with detail levels `0..=max_level`
    /// (capped at `log2 m − 1`); errors if `max_level > log2 m`.
    pub fn new(basis: &WaveletBasis, m: usize, max_level: usize) -> Result<Self> {
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::invalid("m", format!("m = {m} must be a power of two ≥ 2")));
        }
        let k_levels = m.trailing_zeros() as usize;
        if max_level > k_levels {
            return Err(Error::invalid(
                "max_level",
                format!("level {max_level} not representable on a grid of {m} samples"),
            ));
        }
        let jd_max = max_level.min(k_levels - 1);
        let d = basis.dim();
        let r = basis.vanishing_moments();
        let band_len = |j: usize| (1usize << j) + 2 * r - 2;
        let lo = -((2 * r - 2) as i64);

        let mut bands = Vec::new();
        let mut offset = 0;
        let mut push = |j: usize, e: [u8; 2], offset: &mut usize| {
            let len = band_len(j);
            bands.push(BandInfo { j, e, lo, len, offset: *offset });
            *offset += len.pow(d as u32);
        };
        push(0, [0, 0], &mut offset);
        for j in 0..=jd_max {
            for &e in mother_types(d) {
                push(j, e, &mut offset);
            }
        }
        Ok(DwtLayout {
            d,
            m,
            k_levels,
            jd_max,
            h: basis.h.clone(),
            g: basis.g.clone(),
            bands,
            total: offset,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn samples_per_axis(&self) -> usize {
        self.m
    }

    /// Length of the flat coefficient vector.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn max_detail_level(&self) -> usize {
        self.jd_max
    }

    pub fn bands(&self) -> &[BandInfo] {
        &self.bands
    }

    fn band_id(&self, j: usize, e: [u8; 2]) -> Option<usize> {
        if e == [0, 0] {
            return if j == 0 { Some(0) } else { None };
        }
        if j > self.jd_max {
            return None;
        }
        let rank = mother_types(self.d).iter().position(|&t| t == e)?;
        Some(1 + j * mother_types(self.d).len() + rank)
    }

    /// Flat position of a wavelet index, if it is representable in this plan.
    pub fn position(&self, idx: &WaveletIndex) -> Option<usize> {
        let band = &self.bands[self.band_id(idx.j, idx.e)?];
        let hi = (1i64 << band.j) - 1;
        let mut pos = 0;
        for axis in 0..self.d {
            let k = idx.k[axis];
            if k < band.lo || k > hi {
                return None;
            }
            pos = pos * band.len + (k - band.lo) as usize;
        }
        Some(band.offset + pos)
    }

    /// Wavelet index stored at a flat position.
    pub fn index_at(&self, pos: usize) -> WaveletIndex {
        let band = self
            .bands
            .iter()
            .rev()
            .find(|b| b.offset <= pos)
            .expect("position out of range");
        let mut rel = pos - band.offset;
        let mut k = [0i64; 2];
        for axis in (0..self.d).rev() {
            k[axis] = band.lo + (rel % band.len) as i64;
            rel /= band.len;
        }
        WaveletIndex { j: band.j, k, e: band.e }
    }

    /// One decimating filter pass along the leading axis of an
    /// `n_in × ncols` array whose leading-axis spatial range starts at `lo`.
    fn down_pass(&self, src: &[f64], n_in: usize, n_out: usize, ncols: usize, filt: &[f64]) -> Vec<f64> {
        let lo = -(filt.len() as i64 - 2);
        let mut out = vec![0.0; n_out * ncols];
        for k in 0..n_out {
            let k_sp = lo + k as i64;
            for (t, &f) in filt.iter().enumerate() {
                let i_sp = 2 * k_sp + t as i64;
                let row = i_sp - lo;
                if row < 0 || row >= n_in as i64 {
                    continue;
                }
                let row = row as usize;
                let dst = &mut out[k * ncols..(k + 1) * ncols];
                let s = &src[row * ncols..(row + 1) * ncols];
                for c in 0..ncols {
                    dst[c] += f * s[c];
                }
            }
        }
        out
    }

    /// Transposed (upsampling) pass along the leading axis.
    fn up_pass(&self, src: &[f64], n_in: usize, n_out: usize, ncols: usize, filt: &[f64]) -> Vec<f64> {
        let lo = -(filt.len() as i64 - 2);
        let mut out = vec![0.0; n_out * ncols];
        for k in 0..n_in {
            let k_sp = lo + k as i64;
            for (t, &f) in filt.iter().enumerate() {
                let i_sp = 2 * k_sp + t as i64;
                let row = i_sp - lo;
                if row < 0 || row >= n_out as i64 {
                    continue;
                }
                let row = row as usize;
                let dst = &mut out[row * ncols..(row + 1) * ncols];
                let s = &src[k * ncols..(k + 1) * ncols];
                for c in 0..ncols {
                    dst[c] += f * s[c];
                }
            }
        }
        out
    }

    fn band_len(&self, j: usize) -> usize {
        (1usize << j) + self.h.len() - 2
    }

    /// Analysis: `values` (length `m^d`, row-major) → flat coefficients of
    /// the `h^{d/2}`-scaled input.
    pub fn forward(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.m.pow(self.d as u32), "sample count mismatch");
        let margin = self.h.len() - 2;
        let scale = (1.0 / self.m as f64).powi(self.d as i32).sqrt();
        let n_k = self.band_len(self.k_levels);
        // Embed the samples in the full-range array at level K.
        let mut approx = vec![0.0; n_k.pow(self.d as u32)];
        match self.d {
            1 => {
                for i in 0..self.m {
                    approx[margin + i] = scale * values[i];
                }
            }
            _ => {
                for i in 0..self.m {
                    for jj in 0..self.m {
                        approx[(margin + i) * n_k + (margin + jj)] = scale * values[i * self.m + jj];
                    }
                }
            }
        }
        let mut coeffs = vec![0.0; self.total];
        for j in (1..=self.k_levels).rev() {
            let n_in = self.band_len(j);
            let n_out = self.band_len(j - 1);
            let (next, details) = match self.d {
                1 => {
                    let low = self.down_pass(&approx, n_in, n_out, 1, &self.h);
                    let high = self.down_pass(&approx, n_in, n_out, 1, &self.g);
                    (low, vec![([1u8, 0u8], high)])
                }
                _ => {
                    // Leading axis first, then the trailing axis via transpose.
                    let low0 = self.down_pass(&approx, n_in, n_out, n_in, &self.h);
                    let high0 = self.down_pass(&approx, n_in, n_out, n_in, &self.g);
                    let low0t = transpose(&low0, n_out, n_in);
                    let high0t = transpose(&high0, n_out, n_in);
                    let ll = self.down_pass(&low0t, n_in, n_out, n_out, &self.h);
                    let lh = self.down_pass(&low0t, n_in, n_out, n_out, &self.g);
                    let hl = self.down_pass(&high0t, n_in, n_out, n_out, &self.h);
                    let hh = self.down_pass(&high0t, n_in, n_out, n_out, &self.g);
                    // After the second pass the leading axis is axis 1; undo.
                    (
                        transpose(&ll, n_out, n_out),
                        vec![
                            ([0u8, 1u8], transpose(&lh, n_out, n_out)),
                            ([1u8, 0u8], transpose(&hl, n_out, n_out)),
                            ([1u8, 1u8], transpose(&hh, n_out, n_out)),
                        ],
                    )
                }
            };
            if j - 1 <= self.jd_max {
                for (e, data) in &details {
                    let band = &self.bands[self.band_id(j - 1, *e).unwrap()];
                    coeffs[band.offset..band.offset + data.len()].copy_from_slice(data);
                }
            }
            approx = next;
        }
        let father = &self.bands[0];
        coeffs[father.offset..father.offset + approx.len()].copy_from_slice(&approx);
        coeffs
    }

    fn reconstruct(&self, coeffs: &[f64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.total, "coefficient count mismatch");
        let father = &self.bands[0];
        let mut approx =
            coeffs[father.offset..father.offset + father.len.pow(self.d as u32)].to_vec();
        for j in 1..=self.k_levels {
            let n_in = self.band_len(j - 1);
            let n_out = self.band_len(j);
            let detail = |e: [u8; 2]| -> Vec<f64> {
                match self.band_id(j - 1, e) {
                    Some(id) => {
                        let b = &self.bands[id];
                        coeffs[b.offset..b.offset + b.len.pow(self.d as u32)].to_vec()
                    }
                    None => vec![0.0; n_in.pow(self.d as u32)],
                }
            };
            approx = match self.d {
                1 => {
                    let mut up = self.up_pass(&approx, n_in, n_out, 1, &self.h);
                    let up_d = self.up_pass(&detail([1, 0]), n_in, n_out, 1, &self.g);
                    for (a, b) in up.iter_mut().zip(&up_d) {
                        *a += b;
                    }
                    up
                }
                _ => {
                    let ll = transpose(&approx, n_in, n_in);
                    let lh = transpose(&detail([0, 1]), n_in, n_in);
                    let hl = transpose(&detail([1, 0]), n_in, n_in);
                    let hh = transpose(&detail([1, 1]), n_in, n_in);
                    // Trailing axis first (arrays are transposed), then leading.
                    let mut low = self.up_pass(&ll, n_in, n_out, n_in, &self.h);
                    for (a, b) in low.iter_mut().zip(self.up_pass(&lh, n_in, n_out, n_in, &self.g)) {
                        *a += b;
                    }
                    let mut high = self.up_pass(&hl, n_in, n_out, n_in, &self.h);
                    for (a, b) in high.iter_mut().zip(self.up_pass(&hh, n_in, n_out, n_in, &self.g)) {
                        *a += b;
                    }
                    let low = transpose(&low, n_out, n_in);
                    let high = transpose(&high, n_out, n_in);
                    let mut out = self.up_pass(&low, n_in, n_out, n_out, &self.h);
                    for (a, b) in out.iter_mut().zip(self.up_pass(&high, n_in, n_out, n_out, &self.g)) {
                        *a += b;
                    }
                    out
                }
            };
        }
        // Restrict the level-K array to the grid window.
        let margin = self.h.len() - 2;
        let n_k = self.band_len(self.k_levels);
        let mut out = vec![0.0; self.m.pow(self.d as u32)];
        match self.d {
            1 => out.copy_from_slice(&approx[margin..margin + self.m]),
            _ => {
                for i in 0..self.m {
                    for jj in 0..self.m {
                        out[i * self.m + jj] = approx[(margin + i) * n_k + (margin + jj)];
                    }
                }
            }
        }
        out
    }

    /// Adjoint of [`forward`](Self::forward): scatter, filter up, restrict,
    /// scale by `h^{d/2}`.
    pub fn adjoint(&self, coeffs: &[f64]) -> Vec<f64> {
        let scale = (1.0 / self.m as f64).powi(self.d as i32).sqrt();
        let mut out = self.reconstruct(coeffs);
        for v in &mut out {
            *v *= scale;
        }
        out
    }

    /// Left inverse of [`forward`](Self::forward) (exact when all detail
    /// levels are stored): returns grid samples.
    pub fn inverse(&self, coeffs: &[f64]) -> Vec<f64> {
        let scale = (self.m as f64).powi(self.d as i32).sqrt();
        let mut out = self.reconstruct(coeffs);
        for v in &mut out {
            *v *= scale;
        }
        out
    }
}

fn transpose(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = a[i * cols + j];
        }
    }
    out
}
