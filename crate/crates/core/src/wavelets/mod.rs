//! Daubechies tensor wavelet bases, analysis/synthesis transforms, the index
//! sets Ω and Ω_n, and Besov norms computed from coefficients.

pub mod filters;
pub mod transform;

use std::collections::BTreeMap;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grids::GridSignal;
use crate::{Error, Result};

pub use transform::DwtLayout;

/// Orthonormal Daubechies filter bank with `r` vanishing moments,
/// tensorized over `d` axes.
#[derive(Debug, Clone)]
pub struct WaveletBasis {
    r: usize,
    d: usize,
    pub(crate) h: Vec<f64>,
    pub(crate) g: Vec<f64>,
}

impl WaveletBasis {
    pub fn new(r: usize, d: usize) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(Error::invalid("d", format!("dimension {d} not supported (1 or 2)")));
        }
        let h = filters::scaling_filter(r)?.to_vec();
        let g = filters::wavelet_filter(&h);
        Ok(WaveletBasis { r, d, h, g })
    }

    pub fn vanishing_moments(&self) -> usize {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Integer smoothness proxy D = ⌊0.18(R−1)⌋.
    pub fn smoothness(&self) -> usize {
        filters::smoothness(self.r)
    }

    /// Support length 2R−1 of φ and ψ (in units of 2^{−j}).
    pub fn support_len(&self) -> usize {
        2 * self.r - 1
    }

    pub fn scaling_coeffs(&self) -> &[f64] {
        &self.h
    }

    pub fn wavelet_coeffs(&self) -> &[f64] {
        &self.g
    }

    /// Some(message) when `min{R, D} ≤ max{1, d/2+β}`, the regime where the
    /// smoothness assumption behind the vaguelette theory fails. Comparison
    /// uses the unfloored D ≈ 0.18(R−1); Haar instances trip this on purpose.
    pub fn admissibility_warning(&self, beta: f64) -> Option<String> {
        let d_smooth = 0.18 * (self.r as f64 - 1.0);
        let min_rd = (self.r as f64).min(d_smooth);
        let bound = (self.d as f64 / 2.0 + beta).max(1.0);
        if min_rd <= bound {
            Some(format!(
                "basis R={} (D≈{d_smooth:.2}) does not satisfy min{{R,D}} > max{{1, d/2+β}} = {bound} for β = {beta}",
                self.r
            ))
        } else {
            None
        }
    }

    /// Smallest R whose smoothness clears `max{1, d/2+β}`.
    pub fn default_vanishing_moments(d: usize, beta: f64) -> Result<usize> {
        let bound = (d as f64 / 2.0 + beta).max(1.0);
        (1..=filters::MAX_VANISHING_MOMENTS)
            .find(|&r| (r as f64).min(0.18 * (r as f64 - 1.0)) > bound)
            .ok_or_else(|| {
                Error::invalid("beta", format!("no admissible filter table for d={d}, β={beta}"))
            })
    }

    /// Transfer function m0(ξ) = 2^{−1/2} Σ_t h_t e^{−itξ}.
    pub(crate) fn m0(&self, xi: f64) -> Complex64 {
        transfer(&self.h, xi)
    }

    pub(crate) fn m1(&self, xi: f64) -> Complex64 {
        transfer(&self.g, xi)
    }

    /// φ̂(ξ) via the truncated infinite product Π_l m0(2^{−l}ξ); φ̂(0) = 1.
    pub fn scaling_fourier(&self, xi: f64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        let mut arg = xi;
        for _ in 0..64 {
            arg /= 2.0;
            acc *= self.m0(arg);
            if arg.abs() < 1e-12 {
                break;
            }
        }
        acc
    }

    /// ψ̂(ξ) = m1(ξ/2) φ̂(ξ/2).
    pub fn wavelet_fourier(&self, xi: f64) -> Complex64 {
        self.m1(xi / 2.0) * self.scaling_fourier(xi / 2.0)
    }

    /// Fourier transform of the tensor factor ψ or φ per axis, per `e`.
    pub fn tensor_fourier(&self, e: [u8; 2], xi: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for axis in 0..self.d {
            acc *= if e[axis] == 1 {
                self.wavelet_fourier(xi[axis])
            } else {
                self.scaling_fourier(xi[axis])
            };
        }
        acc
    }
}

fn transfer(filt: &[f64], xi: f64) -> Complex64 {
    // Horner-style phase recurrence: one complex exp per evaluation.
    let step = Complex64::new(0.0, -xi).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in filt.iter().rev() {
        acc = acc * step + c;
    }
    acc * std::f64::consts::FRAC_1_SQRT_2
}

/// Index triple (j, k, e); `e = (0,0)` marks scaling (father) indices, which
/// only occur at j = 0. For d = 1 the second components are fixed at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WaveletIndex {
    pub j: usize,
    pub k: [i64; 2],
    pub e: [u8; 2],
}

impl WaveletIndex {
    pub fn father(k: [i64; 2]) -> Self {
        WaveletIndex { j: 0, k, e: [0, 0] }
    }

    pub fn is_father(&self) -> bool {
        self.e == [0, 0]
    }
}

/// Sparse map of wavelet coefficients; only nonzero entries are stored.
#[derive(Debug, Clone)]
pub struct CoeffSet {
    d: usize,
    max_level: usize,
    map: BTreeMap<WaveletIndex, f64>,
}

impl CoeffSet {
    pub fn new(d: usize, max_level: usize) -> Self {
        CoeffSet { d, max_level, map: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn insert(&mut self, idx: WaveletIndex, value: f64) -> Result<()> {
        if idx.j > self.max_level {
            return Err(Error::invalid("idx", format!("level {} exceeds max {}", idx.j, self.max_level)));
        }
        if value != 0.0 {
            self.map.insert(idx, value);
        } else {
            self.map.remove(&idx);
        }
        Ok(())
    }

    pub fn get(&self, idx: &WaveletIndex) -> f64 {
        self.map.get(idx).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WaveletIndex, &f64)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        self.map.values().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// The multiscale index set Ω_n: all of Ω up to level J_n = ⌈d^{−1} log2 n⌉.
#[derive(Debug, Clone)]
pub struct IndexSetOmegaN {
    n: usize,
    j_max: usize,
    indices: Vec<WaveletIndex>,
}

impl IndexSetOmegaN {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn indices(&self) -> &[WaveletIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// J_n = ⌈d^{−1} log2 n⌉ in exact integer arithmetic.
pub fn level_cutoff(n: usize, d: usize) -> usize {
    let ceil_log2 = usize::BITS as usize - (n - 1).leading_zeros() as usize;
    (ceil_log2 + d - 1) / d
}

/// Enumerates Ω_n: every tensor index whose support has nonzero overlap with
/// (0,1)^d at levels j ≤ J_n. Per axis that is `k ∈ [−(2R−2), 2^j−1]`.
pub fn index_set_omega_n(n: usize, d: usize, basis: &WaveletBasis) -> Result<IndexSetOmegaN> {
    if n < 2 {
        return Err(Error::invalid("n", "need n ≥ 2"));
    }
    if basis.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "basis dimension {} vs requested {d}",
            basis.dim()
        )));
    }
    let j_max = level_cutoff(n, d);
    let lo = -(2 * basis.vanishing_moments() as i64 - 2);
    let mut indices = Vec::new();
    let push_band = |j: usize, e: [u8; 2], indices: &mut Vec<WaveletIndex>| {
        let hi = (1i64 << j) - 1;
        match d {
            1 => {
                for k in lo..=hi {
                    indices.push(WaveletIndex { j, k: [k, 0], e });
                }
            }
            _ => {
                for kx in lo..=hi {
                    for ky in lo..=hi {
                        indices.push(WaveletIndex { j, k: [kx, ky], e });
                    }
                }
            }
        }
    };
    push_band(0, [0, 0], &mut indices);
    let mothers: &[[u8; 2]] = match d {
        1 => &[[1, 0]],
        _ => &[[0, 1], [1, 0], [1, 1]],
    };
    for j in 0..=j_max {
        for &e in mothers {
            push_band(j, e, &mut indices);
        }
    }
    Ok(IndexSetOmegaN { n, j_max, indices })
}

/// Wavelet analysis of the zero-extended signal, keeping detail levels up to
/// `j_max` (which must not exceed log2 m).
pub fn analyze(g: &GridSignal, basis: &WaveletBasis, j_max: usize) -> Result<CoeffSet> {
    if basis.dim() != g.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis dimension {} vs signal {}",
            basis.dim(),
            g.dim()
        )));
    }
    let layout = DwtLayout::new(basis, g.samples_per_axis(), j_max)?;
    let flat = layout.forward(g.values());
    let mut set = CoeffSet::new(g.dim(), layout.max_detail_level());
    for (pos, &v) in flat.iter().enumerate() {
        if v != 0.0 {
            set.insert(layout.index_at(pos), v)?;
        }
    }
    Ok(set)
}

/// Wavelet synthesis onto an `m^d` grid; exact left inverse of [`analyze`]
/// when all detail levels were kept.
pub fn synthesize(c: &CoeffSet, basis: &WaveletBasis, m: usize) -> Result<GridSignal> {
    if basis.dim() != c.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis dimension {} vs coefficients {}",
            basis.dim(),
            c.dim()
        )));
    }
    if m < 2 || !m.is_power_of_two() || c.max_level() >= m.trailing_zeros() as usize {
        return Err(Error::invalid(
            "m",
            format!("resolution {m} too coarse for coefficients up to level {}", c.max_level()),
        ));
    }
    let layout = DwtLayout::new(basis, m, c.max_level())?;
    let mut flat = vec![0.0; layout.total()];
    for (idx, &v) in c.iter() {
        let pos = layout.position(idx).ok_or_else(|| {
            Error::invalid("c", format!("index {idx:?} outside the representable range"))
        })?;
        flat[pos] = v;
    }
    GridSignal::new(c.dim(), m, layout.inverse(&flat))
}

/// Besov norm from coefficients:
/// `(Σ_j 2^{jq(s+d/2−d/p)} (Σ_{k,e} |c|^p)^{q/p})^{1/q}`,
/// with max conventions at p = ∞ or q = ∞.
pub fn besov_norm(c: &CoeffSet, s: f64, p: f64, q: f64) -> Result<f64> {
    for (name, v) in [("p", p), ("q", q)] {
        if !(v >= 1.0) {
            return Err(Error::InvalidArgument {
                field: if name == "p" { "p" } else { "q" },
                message: format!("{name} = {v} must be ≥ 1"),
            });
        }
    }
    let d = c.dim() as f64;
    let mut level_lp: BTreeMap<usize, f64> = BTreeMap::new();
    for (idx, &v) in c.iter() {
        let acc = level_lp.entry(idx.j).or_insert(0.0);
        if p.is_finite() {
            *acc += v.abs().powf(p);
        } else {
            *acc = acc.max(v.abs());
        }
    }
    let terms = level_lp.into_iter().map(|(j, acc)| {
        let lp = if p.is_finite() { acc.powf(1.0 / p) } else { acc };
        let weight = (2f64).powf(j as f64 * (s + d / 2.0 - if p.is_finite() { d / p } else { 0.0 }));
        weight * lp
    });
    if q.is_finite() {
        Ok(terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q))
    } else {
        Ok(terms.fold(0.0, f64::max))
    }
}
