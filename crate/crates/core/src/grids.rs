//! Discrete signals on the unit cube, norms, discrete total variation and
//! piecewise-constant phantom generators.
//!
//! Signals are sampled on a uniform dyadic grid over `[0,1]^d` (`d` = 1 or 2)
//! with `m` samples per axis and spacing `h = 1/m`. Values outside the grid
//! are zero by convention, matching compactly supported targets.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Transverse window used by the isotropic TV stencil in 2-D.
///
/// Raw pointwise differences of a binary image converge to the anisotropic
/// (ℓ1) perimeter; averaging the gradient components over a small box before
/// taking magnitudes removes most of that grid bias, bringing the TV of a
/// discretized disc within ~2% of its Euclidean perimeter.
const ISO_SMOOTH_WINDOW: usize = 4;

/// A real-valued signal sampled on a uniform grid over `[0,1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSignal {
    d: usize,
    m: usize,
    values: Vec<f64>,
}

/// Discrete TV flavor: ℓ2 (isotropic) or ℓ1 (anisotropic) magnitude of the
/// forward-difference gradient. In 1-D the two coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TvFlavor {
    Isotropic,
    Anisotropic,
}

impl GridSignal {
    /// Creates a signal from raw values (length must equal `m^d`).
    pub fn new(d: usize, m: usize, values: Vec<f64>) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(Error::invalid("d", format!("dimension {d} not supported (1 or 2)")));
        }
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::invalid("m", format!("m = {m} must be a power of two ≥ 2")));
        }
        if values.len() != m.pow(d as u32) {
            return Err(Error::invalid(
                "values",
                format!("expected {} values, got {}", m.pow(d as u32), values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "non-finite sample"));
        }
        Ok(GridSignal { d, m, values })
    }

    pub fn zeros(d: usize, m: usize) -> Result<Self> {
        GridSignal::new(d, m, vec![0.0; m.pow(d as u32)])
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn samples_per_axis(&self) -> usize {
        self.m
    }

    /// Grid spacing `h = 1/m`.
    pub fn spacing(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// Cell measure `h^d`.
    pub fn cell_measure(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Row-major sample access; `iy` is ignored for `d = 1`.
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        match self.d {
            1 => self.values[ix],
            _ => self.values[ix * self.m + iy],
        }
    }

    /// Pointwise linear combination `self + a * other`.
    pub fn axpy(&self, a: f64, other: &GridSignal) -> Result<GridSignal> {
        if self.d != other.d || self.m != other.m {
            return Err(Error::DimensionMismatch(format!(
                "grids {}^{} vs {}^{}",
                self.m, self.d, other.m, other.d
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x + a * y)
            .collect();
        GridSignal::new(self.d, self.m, values)
    }

    pub fn scale(&self, a: f64) -> GridSignal {
        GridSignal {
            d: self.d,
            m: self.m,
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }
}

/// Phantom geometry, deserialized from `{kind, amplitude, params}` JSON.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PhantomSpec {
    /// Indicator of a disc (d = 2); values are exactly 0 or `amplitude`.
    DiscIndicator { amplitude: f64, center: [f64; 2], radius: f64 },
    /// Sum of disjoint axis-aligned boxes with per-box heights (d = 1 or 2).
    BlockPiecewiseConstant { amplitude: f64, blocks: Vec<Block> },
    /// Compactly supported C^∞ bump (d = 1 or 2).
    SmoothBump { amplitude: f64, center: Vec<f64>, radius: f64 },
    /// Piecewise-constant 1-D profile alternating between 0 and `amplitude`
    /// with `jumps` equispaced transitions (starts and ends at zero level).
    Staircase1d { amplitude: f64, jumps: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Block {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub height: f64,
}

/// Exact (analytic where available) norms of a generated phantom.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhantomMeta {
    pub bv_seminorm: f64,
    pub linf_norm: f64,
    pub l1_norm: f64,
}

/// A phantom together with its certified norm metadata.
#[derive(Debug, Clone)]
pub struct Phantom {
    pub signal: GridSignal,
    pub meta: PhantomMeta,
}

/// Instantiates a phantom on an `m^d` grid. The returned metadata certifies
/// `|g|_BV`, `‖g‖_∞` and `‖g‖_L1` of the continuum object being sampled.
pub fn make_phantom(spec: &PhantomSpec, m: usize, d: usize) -> Result<Phantom> {
    let mut g = GridSignal::zeros(d, m)?;
    let h = g.spacing();
    let meta = match spec {
        PhantomSpec::DiscIndicator { amplitude, center, radius } => {
            if d != 2 {
                return Err(Error::invalid("d", "disc-indicator requires d = 2"));
            }
            check_unit(&center[..], "center")?;
            if *radius <= 0.0 || center[0] - radius < 0.0 || center[0] + radius > 1.0
                || center[1] - radius < 0.0 || center[1] + radius > 1.0
            {
                return Err(Error::invalid("radius", "disc leaves the unit square"));
            }
            for ix in 0..m {
                for iy in 0..m {
                    let x = (ix as f64 + 0.5) * h - center[0];
                    let y = (iy as f64 + 0.5) * h - center[1];
                    if x * x + y * y <= radius * radius {
                        g.values_mut()[ix * m + iy] = *amplitude;
                    }
                }
            }
            PhantomMeta {
                bv_seminorm: amplitude.abs() * 2.0 * std::f64::consts::PI * radius,
                linf_norm: amplitude.abs(),
                l1_norm: amplitude.abs() * std::f64::consts::PI * radius * radius,
            }
        }
        PhantomSpec::BlockPiecewiseConstant { amplitude, blocks } => {
            let mut bv = 0.0;
            let mut linf: f64 = 0.0;
            let mut l1 = 0.0;
            for (bi, b) in blocks.iter().enumerate() {
                if b.lo.len() != d || b.hi.len() != d {
                    return Err(Error::invalid("blocks", format!("block {bi} has wrong dimension")));
                }
                check_unit(&b.lo, "blocks.lo")?;
                check_unit(&b.hi, "blocks.hi")?;
                if b.lo.iter().zip(&b.hi).any(|(lo, hi)| lo >= hi) {
                    return Err(Error::invalid("blocks", format!("block {bi} is empty")));
                }
                for other in &blocks[..bi] {
                    let overlap = (0..d)
                        .all(|a| b.lo[a] < other.hi[a] && other.lo[a] < b.hi[a]);
                    if overlap {
                        return Err(Error::invalid("blocks", "blocks must be disjoint"));
                    }
                }
                let v = amplitude * b.height;
                let sides: Vec<f64> = (0..d).map(|a| b.hi[a] - b.lo[a]).collect();
                let vol: f64 = sides.iter().product();
                let perimeter = match d {
                    1 => 2.0,
                    _ => 2.0 * (sides[0] + sides[1]),
                };
                bv += v.abs() * perimeter;
                linf = linf.max(v.abs());
                l1 += v.abs() * vol;
                match d {
                    1 => {
                        for ix in 0..m {
                            let x = (ix as f64 + 0.5) * h;
                            if x >= b.lo[0] && x <= b.hi[0] {
                                g.values_mut()[ix] += v;
                            }
                        }
                    }
                    _ => {
                        for ix in 0..m {
                            for iy in 0..m {
                                let x = (ix as f64 + 0.5) * h;
                                let y = (iy as f64 + 0.5) * h;
                                if x >= b.lo[0] && x <= b.hi[0] && y >= b.lo[1] && y <= b.hi[1] {
                                    g.values_mut()[ix * m + iy] += v;
                                }
                            }
                        }
                    }
                }
            }
            PhantomMeta { bv_seminorm: bv, linf_norm: linf, l1_norm: l1 }
        }
        PhantomSpec::SmoothBump { amplitude, center, radius } => {
            if center.len() != d {
                return Err(Error::invalid("center", "wrong dimension"));
            }
            check_unit(center, "center")?;
            if *radius <= 0.0
                || center.iter().any(|&c| c - radius < 0.0 || c + radius > 1.0)
            {
                return Err(Error::invalid("radius", "bump leaves the unit cube"));
            }
            let bump = |r2: f64| -> f64 {
                if r2 >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - r2)).exp()
                }
            };
            match d {
                1 => {
                    for ix in 0..m {
                        let t = ((ix as f64 + 0.5) * h - center[0]) / radius;
                        g.values_mut()[ix] = amplitude * bump(t * t);
                    }
                }
                _ => {
                    for ix in 0..m {
                        for iy in 0..m {
                            let tx = ((ix as f64 + 0.5) * h - center[0]) / radius;
                            let ty = ((iy as f64 + 0.5) * h - center[1]) / radius;
                            g.values_mut()[ix * m + iy] = amplitude * bump(tx * tx + ty * ty);
                        }
                    }
                }
            }
            // No closed form for the bump's BV seminorm; certify it by fine
            // quadrature at 4x the target resolution.
            let fine = smooth_bump_refined(*amplitude, center, *radius, d, 4 * m)?;
            PhantomMeta {
                bv_seminorm: tv_seminorm(&fine, TvFlavor::Isotropic),
                linf_norm: amplitude.abs() * bump(0.0),
                l1_norm: lq_norm(&fine, 1.0)?,
            }
        }
        PhantomSpec::Staircase1d { amplitude, jumps } => {
            if d != 1 {
                return Err(Error::invalid("d", "staircase-1d requires d = 1"));
            }
            if *jumps == 0 {
                return Err(Error::invalid("jumps", "need at least one jump"));
            }
            // Transitions at i/(jumps+1); the profile alternates 0 ↔ amplitude.
            let mut width_on = 0.0;
            for ix in 0..m {
                let x = (ix as f64 + 0.5) * h;
                let seg = ((x * (*jumps as f64 + 1.0)).floor() as usize).min(*jumps);
                if seg % 2 == 1 {
                    g.values_mut()[ix] = *amplitude;
                }
            }
            for seg in 0..=*jumps {
                if seg % 2 == 1 {
                    width_on += 1.0 / (*jumps as f64 + 1.0);
                }
            }
            PhantomMeta {
                bv_seminorm: amplitude.abs() * *jumps as f64,
                linf_norm: amplitude.abs(),
                l1_norm: amplitude.abs() * width_on,
            }
        }
    };
    let meta = if is_zero_amplitude(spec) {
        PhantomMeta { bv_seminorm: 0.0, linf_norm: 0.0, l1_norm: 0.0 }
    } else {
        meta
    };
    Ok(Phantom { signal: g, meta })
}

fn is_zero_amplitude(spec: &PhantomSpec) -> bool {
    let a = match spec {
        PhantomSpec::DiscIndicator { amplitude, .. } => amplitude,
        PhantomSpec::BlockPiecewiseConstant { amplitude, .. } => amplitude,
        PhantomSpec::SmoothBump { amplitude, .. } => amplitude,
        PhantomSpec::Staircase1d { amplitude, .. } => amplitude,
    };
    *a == 0.0
}

fn smooth_bump_refined(
    amplitude: f64,
    center: &[f64],
    radius: f64,
    d: usize,
    m: usize,
) -> Result<GridSignal> {
    let spec = PhantomSpec::SmoothBump {
        amplitude,
        center: center.to_vec(),
        radius,
    };
    // Recursion is bounded: the refined call only samples, it does not refine
    // again because we bypass metadata here.
    let mut g = GridSignal::zeros(d, m)?;
    let h = g.spacing();
    if let PhantomSpec::SmoothBump { .. } = spec {
        let bump = |r2: f64| -> f64 {
            if r2 >= 1.0 {
                0.0
            } else {
                (1.0 - 1.0 / (1.0 - r2)).exp()
            }
        };
        match d {
            1 => {
                for ix in 0..m {
                    let t = ((ix as f64 + 0.5) * h - center[0]) / radius;
                    g.values_mut()[ix] = amplitude * bump(t * t);
                }
            }
            _ => {
                for ix in 0..m {
                    for iy in 0..m {
                        let tx = ((ix as f64 + 0.5) * h - center[0]) / radius;
                        let ty = ((iy as f64 + 0.5) * h - center[1]) / radius;
                        g.values_mut()[ix * m + iy] = amplitude * bump(tx * tx + ty * ty);
                    }
                }
            }
        }
    }
    Ok(g)
}

fn check_unit(x: &[f64], field: &'static str) -> Result<()> {
    if x.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::invalid(field, "coordinate outside [0,1]^d"));
    }
    Ok(())
}

/// `L^q` norm with the grid quadrature `(Σ h^d |g_i|^q)^{1/q}`; `q = ∞` gives
/// the max norm.
pub fn lq_norm(g: &GridSignal, q: f64) -> Result<f64> {
    if q.is_infinite() && q > 0.0 {
        return Ok(linf_norm(g));
    }
    if !(q >= 1.0) {
        return Err(Error::invalid("q", format!("q = {q} must be ≥ 1")));
    }
    let hd = g.cell_measure();
    let sum: f64 = g.values().iter().map(|v| v.abs().powf(q)).sum();
    Ok((hd * sum).powf(1.0 / q))
}

/// Max absolute sample value.
pub fn linf_norm(g: &GridSignal) -> f64 {
    g.values().iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Discrete total variation seminorm.
///
/// Differences are taken on the zero-extended lattice, so jumps at the edge
/// of the support (including the boundary of `[0,1]^d`) are counted. The
/// isotropic flavor in 2-D averages the gradient components over a small box
/// window before taking magnitudes (see [`ISO_SMOOTH_WINDOW`]).
pub fn tv_seminorm(g: &GridSignal, flavor: TvFlavor) -> f64 {
    let m = g.samples_per_axis();
    let h = g.spacing();
    match g.dim() {
        1 => {
            // Both flavors coincide: Σ |g_i − g_{i−1}| with zero extension.
            let v = g.values();
            let mut tv = v[0].abs() + v[m - 1].abs();
            for i in 1..m {
                tv += (v[i] - v[i - 1]).abs();
            }
            tv
        }
        _ => match flavor {
            TvFlavor::Anisotropic => {
                let mut tv = 0.0;
                for ix in 0..=m {
                    for iy in 0..m {
                        let a = if ix < m { g.at(ix, iy) } else { 0.0 };
                        let b = if ix > 0 { g.at(ix - 1, iy) } else { 0.0 };
                        tv += (a - b).abs();
                    }
                }
                for ix in 0..m {
                    for iy in 0..=m {
                        let a = if iy < m { g.at(ix, iy) } else { 0.0 };
                        let b = if iy > 0 { g.at(ix, iy - 1) } else { 0.0 };
                        tv += (a - b).abs();
                    }
                }
                h * tv
            }
            TvFlavor::Isotropic => {
                let (dx, dy, n) = smoothed_gradient(g, ISO_SMOOTH_WINDOW);
                let mut tv = 0.0;
                for i in 0..n * n {
                    tv += (dx[i] * dx[i] + dy[i] * dy[i]).sqrt();
                }
                h * tv
            }
        },
    }
}

/// Backward differences of the zero-extended signal on an enlarged lattice,
/// box-averaged with window `k`. Returns `(dx, dy, n)` with `n` the lattice
/// side length.
pub(crate) fn smoothed_gradient(g: &GridSignal, k: usize) -> (Vec<f64>, Vec<f64>, usize) {
    let m = g.samples_per_axis();
    let p = k + 1; // margin so windows never clip support
    let n = m + 2 * p;
    let get = |ix: isize, iy: isize| -> f64 {
        if ix < 0 || iy < 0 || ix >= m as isize || iy >= m as isize {
            0.0
        } else {
            g.at(ix as usize, iy as usize)
        }
    };
    let mut dx = vec![0.0; n * n];
    let mut dy = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let ix = i as isize - p as isize;
            let iy = j as isize - p as isize;
            dx[i * n + j] = get(ix, iy) - get(ix - 1, iy);
            dy[i * n + j] = get(ix, iy) - get(ix, iy - 1);
        }
    }
    if k > 1 {
        dx = box_average(&dx, n, k);
        dy = box_average(&dy, n, k);
    }
    (dx, dy, n)
}

/// Separable 2-D box average with window `k` (offsets `-k/2 .. k-1-k/2`),
/// zero beyond the lattice.
pub(crate) fn box_average(field: &[f64], n: usize, k: usize) -> Vec<f64> {
    let lo = -((k / 2) as isize);
    let pass = |src: &[f64], axis: usize| -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for t in 0..k as isize {
                    let (a, b) = if axis == 0 {
                        (i as isize + lo + t, j as isize)
                    } else {
                        (i as isize, j as isize + lo + t)
                    };
                    if a >= 0 && b >= 0 && (a as usize) < n && (b as usize) < n {
                        acc += src[a as usize * n + b as usize];
                    }
                }
                out[i * n + j] = acc / k as f64;
            }
        }
        out
    };
    pass(&pass(field, 0), 1)
}
