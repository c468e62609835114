//! Forward operators T, their adjoints, vaguelette dictionaries satisfying
//! T*u_{j,k,e} = κ_j ψ_{j,k,e}, and frame-bound computation.

pub mod dict;
pub mod fourier;
pub mod radon;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grids::GridSignal;
use crate::wavelets::WaveletBasis;
use crate::{Error, Result};

pub use dict::{VagueletteDict, VagueletteMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Identity,
    Integration1d,
    Convolution,
    Radon2d,
}

/// Convolution kernel given through its Fourier transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum MultiplierSpec {
    /// F[K](ξ) = (1+|ξ|²)^{−β/2}; the sandwich constants are exactly (1,1).
    Sobolev,
    /// Piecewise-linear table over |ξ| (extended by its last value); all
    /// entries must be nonzero — band-limited kernels admit no vaguelettes.
    Table { xi: Vec<f64>, value: Vec<f64> },
}

/// Forward operator specification; grids attach at call time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorModel {
    kind: OperatorKind,
    d: usize,
    beta: f64,
    multiplier: MultiplierSpec,
    /// Padded-window factor for convolution (power of two ≥ 2). The window
    /// [−(p−1)/2, (p+1)/2)^d must cover the supports of all dictionary
    /// wavelets when sampled vaguelettes are requested.
    #[serde(default = "default_pad_factor")]
    pad_factor: usize,
}

fn default_pad_factor() -> usize {
    2
}

/// Codomain window descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CodomainDesc {
    /// Same grid as the domain: [0,1]^d, m^d cells.
    Grid { d: usize, m: usize },
    /// Zero-padded window [−(factor−1)/2, (factor+1)/2)^d with (factor·m)^d
    /// cells of spacing 1/m; cell i sits at (i − m(factor−1)/2)·h per axis.
    Padded { d: usize, m: usize, factor: usize },
    /// Parallel-beam sinogram: m angles × 2m offsets.
    Sinogram { m: usize },
}

impl CodomainDesc {
    pub fn len(&self) -> usize {
        match *self {
            CodomainDesc::Grid { d, m } => m.pow(d as u32),
            CodomainDesc::Padded { d, m, factor } => (factor * m).pow(d as u32),
            CodomainDesc::Sinogram { m } => 2 * m * m,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature cell measure of the codomain window.
    pub fn cell_measure(&self) -> f64 {
        match *self {
            CodomainDesc::Grid { d, m } | CodomainDesc::Padded { d, m, .. } => {
                (1.0 / m as f64).powi(d as i32)
            }
            CodomainDesc::Sinogram { m } => radon::RadonGeometry::new(m).cell_measure(),
        }
    }
}

/// Function samples on a codomain window.
#[derive(Debug, Clone, PartialEq)]
pub struct CodomainSignal {
    pub desc: CodomainDesc,
    pub values: Vec<f64>,
}

impl CodomainSignal {
    pub fn new(desc: CodomainDesc, values: Vec<f64>) -> Result<Self> {
        if values.len() != desc.len() {
            return Err(Error::DimensionMismatch(format!(
                "codomain expects {} samples, got {}",
                desc.len(),
                values.len()
            )));
        }
        Ok(CodomainSignal { desc, values })
    }

    pub fn zeros(desc: CodomainDesc) -> Self {
        CodomainSignal { desc, values: vec![0.0; desc.len()] }
    }

    /// Quadrature inner product on the window.
    pub fn inner_product(&self, other: &CodomainSignal) -> Result<f64> {
        if self.desc != other.desc {
            return Err(Error::DimensionMismatch("codomain windows differ".into()));
        }
        let w = self.desc.cell_measure();
        Ok(w * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>())
    }

    pub fn l2_norm(&self) -> f64 {
        (self.desc.cell_measure() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }
}

impl OperatorModel {
    pub fn identity(d: usize) -> Self {
        OperatorModel {
            kind: OperatorKind::Identity,
            d,
            beta: 0.0,
            multiplier: MultiplierSpec::Sobolev,
            pad_factor: 2,
        }
    }

    pub fn integration_1d() -> Self {
        OperatorModel {
            kind: OperatorKind::Integration1d,
            d: 1,
            beta: 1.0,
            multiplier: MultiplierSpec::Sobolev,
            pad_factor: 2,
        }
    }

    pub fn convolution(d: usize, beta: f64, multiplier: MultiplierSpec) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(Error::invalid("beta", "degree of ill-posedness must be ≥ 0"));
        }
        if let MultiplierSpec::Table { xi, value } = &multiplier {
            if xi.len() != value.len() || xi.is_empty() {
                return Err(Error::invalid("multiplier", "table needs matching nonempty xi/value"));
            }
            if xi.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid("multiplier", "table xi must be strictly increasing"));
            }
            if value.iter().any(|&v| v == 0.0 || !v.is_finite()) {
                return Err(Error::invalid(
                    "multiplier",
                    "kernel with Fourier zeros admits no vaguelette system",
                ));
            }
        }
        Ok(OperatorModel { kind: OperatorKind::Convolution, d, beta, multiplier, pad_factor: 2 })
    }

    /// Widens the convolution padding window; `factor` must be a power of two
    /// ≥ 2. Required when the dictionary's coarse wavelets (support width
    /// 2R−1 per axis) overflow the default 2× window: `factor ≥ 4R−3` keeps
    /// every sampled vaguelette inside the window.
    pub fn with_pad_factor(mut self, factor: usize) -> Result<Self> {
        if self.kind != OperatorKind::Convolution {
            return Err(Error::invalid("pad-factor", "only the convolution codomain is padded"));
        }
        if factor < 2 || !factor.is_power_of_two() {
            return Err(Error::invalid("pad-factor", "must be a power of two ≥ 2"));
        }
        self.pad_factor = factor;
        Ok(self)
    }

    pub fn pad_factor(&self) -> usize {
        self.pad_factor
    }

    pub fn radon_2d() -> Self {
        OperatorModel {
            kind: OperatorKind::Radon2d,
            d: 2,
            beta: 0.5,
            multiplier: MultiplierSpec::Sobolev,
            pad_factor: 2,
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Singular value κ_j = 2^{−jβ}.
    pub fn singular_value(&self, j: usize) -> f64 {
        (2f64).powf(-(j as f64) * self.beta)
    }

    /// Sandwich constants (a1, a2) of the multiplier against the Sobolev
    /// envelope (1+|ξ|²)^{−β/2}; exact (1,1) for the Sobolev kernel itself.
    pub fn sandwich_constants(&self) -> (f64, f64) {
        match &self.multiplier {
            MultiplierSpec::Sobolev => (1.0, 1.0),
            MultiplierSpec::Table { xi, value } => {
                let mut a1 = f64::INFINITY;
                let mut a2 = 0.0f64;
                for (&x, &v) in xi.iter().zip(value) {
                    let envelope = (1.0 + x * x).powf(-self.beta / 2.0);
                    let ratio = v.abs() / envelope;
                    a1 = a1.min(ratio);
                    a2 = a2.max(ratio);
                }
                (a1, a2)
            }
        }
    }

    /// Multiplier value at squared frequency |ξ|².
    pub fn multiplier_value(&self, xi_sq: f64) -> f64 {
        match &self.multiplier {
            MultiplierSpec::Sobolev => (1.0 + xi_sq).powf(-self.beta / 2.0),
            MultiplierSpec::Table { xi, value } => {
                let x = xi_sq.sqrt();
                match xi.iter().position(|&t| t >= x) {
                    Some(0) => value[0],
                    Some(i) => {
                        let t = (x - xi[i - 1]) / (xi[i] - xi[i - 1]);
                        value[i - 1] + t * (value[i] - value[i - 1])
                    }
                    None => *value.last().unwrap(),
                }
            }
        }
    }

    /// Codomain window produced by [`apply`](Self::apply) at resolution m.
    pub fn codomain(&self, m: usize) -> CodomainDesc {
        match self.kind {
            OperatorKind::Identity | OperatorKind::Integration1d => CodomainDesc::Grid { d: self.d, m },
            OperatorKind::Convolution => {
                CodomainDesc::Padded { d: self.d, m, factor: self.pad_factor }
            }
            OperatorKind::Radon2d => CodomainDesc::Sinogram { m },
        }
    }

    /// Forward map Tg.
    pub fn apply(&self, g: &GridSignal) -> Result<CodomainSignal> {
        if g.dim() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "operator dimension {} vs signal {}",
                self.d,
                g.dim()
            )));
        }
        let m = g.samples_per_axis();
        let values = match self.kind {
            OperatorKind::Identity => g.values().to_vec(),
            OperatorKind::Integration1d => {
                let h = g.spacing();
                let mut acc = 0.0;
                g.values()
                    .iter()
                    .map(|v| {
                        acc += h * v;
                        acc
                    })
                    .collect()
            }
            OperatorKind::Convolution => {
                let p = self.pad_factor;
                let mut spec = fourier::embed(g.values(), self.d, m, p);
                match self.d {
                    1 => fourier::fft_1d(&mut spec, false),
                    _ => fourier::fft_2d(&mut spec, p * m, false),
                }
                fourier::apply_multiplier(&mut spec, self.d, m, p, |xi_sq| {
                    self.multiplier_value(xi_sq)
                });
                match self.d {
                    1 => fourier::fft_1d(&mut spec, true),
                    _ => fourier::fft_2d(&mut spec, p * m, true),
                }
                spec.iter().map(|v| v.re).collect()
            }
            OperatorKind::Radon2d => radon::forward(g.values(), m),
        };
        CodomainSignal::new(self.codomain(m), values)
    }

    /// Adjoint map T*u w.r.t. the quadrature inner products.
    pub fn adjoint(&self, u: &CodomainSignal) -> Result<GridSignal> {
        let m = match u.desc {
            CodomainDesc::Grid { d, m } | CodomainDesc::Padded { d, m, .. } if d == self.d => m,
            CodomainDesc::Sinogram { m } if self.kind == OperatorKind::Radon2d => m,
            _ => {
                return Err(Error::DimensionMismatch(format!(
                    "codomain {:?} does not match operator {:?}",
                    u.desc, self.kind
                )))
            }
        };
        if u.desc != self.codomain(m) {
            return Err(Error::DimensionMismatch(format!(
                "expected codomain {:?}, got {:?}",
                self.codomain(m),
                u.desc
            )));
        }
        let values = match self.kind {
            OperatorKind::Identity => u.values.clone(),
            OperatorKind::Integration1d => {
                let h = 1.0 / m as f64;
                let mut acc = 0.0;
                let mut out = vec![0.0; m];
                for i in (0..m).rev() {
                    acc += h * u.values[i];
                    out[i] = acc;
                }
                out
            }
            OperatorKind::Convolution => {
                // Real symmetric multipliers: the adjoint is the same
                // Fourier filter on the padded window, restricted.
                let p = self.pad_factor;
                let mut spec: Vec<Complex64> =
                    u.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                match self.d {
                    1 => fourier::fft_1d(&mut spec, false),
                    _ => fourier::fft_2d(&mut spec, p * m, false),
                }
                fourier::apply_multiplier(&mut spec, self.d, m, p, |xi_sq| {
                    self.multiplier_value(xi_sq)
                });
                match self.d {
                    1 => fourier::fft_1d(&mut spec, true),
                    _ => fourier::fft_2d(&mut spec, p * m, true),
                }
                fourier::restrict(&spec, self.d, m, p)
            }
            OperatorKind::Radon2d => radon::adjoint(&u.values, m),
        };
        GridSignal::new(self.d, m, values)
    }

    /// Frame bounds (c1, c2) for the vaguelette system:
    /// c1 = min_e ‖(−Δ)^{β/2}ψ_{0,0,e}‖_{L2}, c2 = max_e ‖ψ_{0,0,e}‖_{H^β},
    /// by Fourier quadrature over the window |ξ_axis| ≤ π·resolution.
    /// Identity (and any β = 0 kernel) reduces to (1,1) analytically.
    pub fn frame_bounds(&self, basis: &WaveletBasis, resolution: usize) -> Result<(f64, f64)> {
        if basis.dim() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "basis dimension {} vs operator {}",
                basis.dim(),
                self.d
            )));
        }
        if self.beta == 0.0 {
            return Ok((1.0, 1.0));
        }
        let beta = self.beta;
        // Quadrature grid: one-axis trapezoid with step tied to an
        // oversampled support, window π·resolution (the grid Nyquist rate).
        let lim = std::f64::consts::PI * resolution as f64;
        let step = 0.05;
        let n = (2.0 * lim / step).ceil() as usize;
        let types: &[[u8; 2]] = match self.d {
            1 => &[[0, 0], [1, 0]],
            _ => &[[0, 0], [0, 1], [1, 0], [1, 1]],
        };
        let mut c1_sq = f64::INFINITY;
        let mut c2_sq = 0.0f64;
        for &e in types {
            let mut low = 0.0;
            let mut high = 0.0;
            match self.d {
                1 => {
                    for i in 0..=n {
                        let xi = -lim + i as f64 * step;
                        let w = if i == 0 || i == n { 0.5 } else { 1.0 } * step
                            / (2.0 * std::f64::consts::PI);
                        let p = basis.tensor_fourier(e, &[xi]).norm_sqr();
                        low += w * p * xi.abs().powf(2.0 * beta);
                        high += w * p * (1.0 + xi * xi).powf(beta);
                    }
                }
                _ => {
                    // Tensor structure: |ψ̂_e(ξ)|² factorizes, so integrate
                    // the radial weights against separable marginals on a
                    // coarser 2-D lattice.
                    let step2 = 0.2;
                    let n2 = (2.0 * lim / step2).ceil() as usize;
                    let factor: Vec<(f64, f64)> = (0..=n2)
                        .map(|i| {
                            let xi = -lim + i as f64 * step2;
                            let w = if i == 0 || i == n2 { 0.5 } else { 1.0 };
                            (xi, w)
                        })
                        .collect();
                    let px: Vec<f64> = factor
                        .iter()
                        .map(|&(xi, _)| {
                            if e[0] == 1 {
                                basis.wavelet_fourier(xi).norm_sqr()
                            } else {
                                basis.scaling_fourier(xi).norm_sqr()
                            }
                        })
                        .collect();
                    let py: Vec<f64> = factor
                        .iter()
                        .map(|&(xi, _)| {
                            if e[1] == 1 {
                                basis.wavelet_fourier(xi).norm_sqr()
                            } else {
                                basis.scaling_fourier(xi).norm_sqr()
                            }
                        })
                        .collect();
                    let wnorm = step2 / (2.0 * std::f64::consts::PI);
                    for (ix, &(xix, wx)) in factor.iter().enumerate() {
                        for (iy, &(xiy, wy)) in factor.iter().enumerate() {
                            let w = wx * wy * wnorm * wnorm;
                            let p = px[ix] * py[iy];
                            let r2 = xix * xix + xiy * xiy;
                            low += w * p * r2.powf(beta);
                            high += w * p * (1.0 + r2).powf(beta);
                        }
                    }
                }
            }
            c1_sq = c1_sq.min(low);
            c2_sq = c2_sq.max(high);
        }
        // For the Radon geometry the exact relation T*u = κ_j ψ pins
        // ‖u_ω‖² = (2π)^{−1}·(Sobolev weight of ψ_e): the polar Jacobian
        // contributes the extra 1/2π relative to the convolution case.
        let scale = if self.kind == OperatorKind::Radon2d {
            1.0 / (2.0 * std::f64::consts::PI).sqrt()
        } else {
            1.0
        };
        Ok((scale * c1_sq.sqrt(), scale * c2_sq.sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_grid(rng: &mut StdRng, d: usize, m: usize) -> GridSignal {
        let values = (0..m.pow(d as u32)).map(|_| rng.random_range(-1.0..1.0)).collect();
        GridSignal::new(d, m, values).unwrap()
    }

    fn random_codomain(rng: &mut StdRng, desc: CodomainDesc) -> CodomainSignal {
        let values = (0..desc.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        CodomainSignal::new(desc, values).unwrap()
    }

    fn domain_inner(f: &GridSignal, g: &GridSignal) -> f64 {
        let w = f.spacing().powi(f.dim() as i32);
        w * f.values().iter().zip(g.values()).map(|(a, b)| a * b).sum::<f64>()
    }

    /// ⟨Tf, u⟩ = ⟨f, T*u⟩ over random pairs, both quadrature inner products.
    fn check_adjointness(op: &OperatorModel, m: usize, pairs: usize, tol: f64, seed: u64) {
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..pairs {
            let f = random_grid(&mut rng, op.dim(), m);
            let u = random_codomain(&mut rng, op.codomain(m));
            let lhs = op.apply(&f).unwrap().inner_product(&u).unwrap();
            let rhs = domain_inner(&f, &op.adjoint(&u).unwrap());
            let scale = lhs.abs().max(rhs.abs()).max(1e-12);
            assert!(
                (lhs - rhs).abs() <= tol * scale,
                "adjointness gap {} vs {} for {:?}",
                lhs,
                rhs,
                op.kind()
            );
        }
    }

    #[test]
    fn identity_apply_and_adjoint_are_identity() {
        let op = OperatorModel::identity(1);
        let mut rng = StdRng::seed_from_u64(1);
        let f = random_grid(&mut rng, 1, 64);
        assert_eq!(op.apply(&f).unwrap().values, f.values());
        let u = random_codomain(&mut rng, op.codomain(64));
        assert_eq!(op.adjoint(&u).unwrap().values(), u.values.as_slice());
    }

    #[test]
    fn integration_cumulative_example() {
        let op = OperatorModel::integration_1d();
        let f = GridSignal::new(1, 4, vec![1.0; 4]).unwrap();
        let y = op.apply(&f).unwrap();
        assert_eq!(y.values, vec![0.25, 0.5, 0.75, 1.0]);
        let u = CodomainSignal::new(op.codomain(4), vec![1.0; 4]).unwrap();
        let back = op.adjoint(&u).unwrap();
        assert_eq!(back.values(), &[1.0, 0.75, 0.5, 0.25]);
    }

    #[test]
    fn integration_adjointness() {
        check_adjointness(&OperatorModel::integration_1d(), 128, 20, 1e-12, 7);
    }

    #[test]
    fn convolution_adjointness_1d_and_2d() {
        let op = OperatorModel::convolution(1, 1.0, MultiplierSpec::Sobolev).unwrap();
        check_adjointness(&op, 128, 20, 1e-10, 11);
        let op = OperatorModel::convolution(2, 0.5, MultiplierSpec::Sobolev).unwrap();
        check_adjointness(&op, 16, 20, 1e-10, 13);
    }

    #[test]
    fn radon_adjointness() {
        check_adjointness(&OperatorModel::radon_2d(), 32, 10, 1e-10, 17);
    }

    #[test]
    fn convolution_beta_zero_restricts_to_identity() {
        // Multiplier ≡ 1: the padded output carries f in the signal cells
        // and zeros elsewhere.
        let op = OperatorModel::convolution(1, 0.0, MultiplierSpec::Sobolev).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let f = random_grid(&mut rng, 1, 32);
        let y = op.apply(&f).unwrap();
        let restricted = fourier::restrict(
            &y.values.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>(),
            1,
            32,
            2,
        );
        for (a, b) in restricted.iter().zip(f.values()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        let outside: f64 = y.values[..16].iter().chain(&y.values[48..]).map(|v| v.abs()).sum();
        assert!(outside <= 1e-12, "zero padding leaked {outside}");
    }

    #[test]
    fn singular_values_follow_two_power_beta() {
        assert_eq!(OperatorModel::identity(2).singular_value(9), 1.0);
        assert_relative_eq!(OperatorModel::integration_1d().singular_value(3), 0.125);
        let conv = OperatorModel::convolution(1, 1.0, MultiplierSpec::Sobolev).unwrap();
        assert_relative_eq!(conv.singular_value(5), 0.03125);
        let radon = OperatorModel::radon_2d();
        for j in 0..8 {
            assert_relative_eq!(radon.singular_value(j), 2f64.powf(-(j as f64) / 2.0));
        }
    }

    #[test]
    fn sandwich_constants_examples() {
        let op = OperatorModel::convolution(1, 1.0, MultiplierSpec::Sobolev).unwrap();
        assert_eq!(op.sandwich_constants(), (1.0, 1.0));
        let table = MultiplierSpec::Table { xi: vec![0.0, 1.0], value: vec![1.0, 0.5] };
        let op = OperatorModel::convolution(1, 1.0, table).unwrap();
        let (a1, a2) = op.sandwich_constants();
        // Ratios |K̂|/envelope: 1 at ξ = 0, 0.5/2^{−1/2} = 2^{−1/2} at ξ = 1.
        assert_relative_eq!(a1, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(a2, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn multiplier_table_interpolates_and_extends() {
        let table = MultiplierSpec::Table { xi: vec![1.0, 3.0], value: vec![2.0, 6.0] };
        let op = OperatorModel::convolution(1, 0.5, table).unwrap();
        assert_relative_eq!(op.multiplier_value(4.0), 4.0, epsilon = 1e-12); // |ξ| = 2
        assert_relative_eq!(op.multiplier_value(0.25), 2.0, epsilon = 1e-12); // below range
        assert_relative_eq!(op.multiplier_value(100.0), 6.0, epsilon = 1e-12); // above range
    }

    #[test]
    fn multiplier_with_fourier_zero_is_rejected() {
        let table = MultiplierSpec::Table { xi: vec![0.0, 1.0], value: vec![1.0, 0.0] };
        assert!(OperatorModel::convolution(1, 1.0, table).is_err());
    }

    #[test]
    fn pad_factor_validation() {
        let conv = OperatorModel::convolution(1, 1.0, MultiplierSpec::Sobolev).unwrap();
        assert!(conv.clone().with_pad_factor(3).is_err());
        assert!(conv.clone().with_pad_factor(1).is_err());
        let wide = conv.with_pad_factor(32).unwrap();
        assert_eq!(wide.codomain(64), CodomainDesc::Padded { d: 1, m: 64, factor: 32 });
        assert!(OperatorModel::identity(1).with_pad_factor(4).is_err());
    }

    #[test]
    fn frame_bounds_beta_zero_is_one_one() {
        let basis = WaveletBasis::new(4, 1).unwrap();
        let op = OperatorModel::identity(1);
        assert_eq!(op.frame_bounds(&basis, 64).unwrap(), (1.0, 1.0));
        let conv = OperatorModel::convolution(1, 0.0, MultiplierSpec::Sobolev).unwrap();
        assert_eq!(conv.frame_bounds(&basis, 64).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn frame_bounds_pinned_values() {
        // Deterministic quadrature; values frozen as regressions.
        let b5 = WaveletBasis::new(5, 1).unwrap();
        let conv = OperatorModel::convolution(1, 1.0, MultiplierSpec::Sobolev).unwrap();
        let (c1, c2) = conv.frame_bounds(&b5, 64).unwrap();
        assert_relative_eq!(c1, 1.958289665399892, max_relative = 1e-12);
        assert_relative_eq!(c2, 5.276515478414807, max_relative = 1e-12);
        let b3 = WaveletBasis::new(3, 2).unwrap();
        let (c1, c2) = OperatorModel::radon_2d().frame_bounds(&b3, 64).unwrap();
        assert_relative_eq!(c1, 0.6569700038545295, max_relative = 1e-12);
        assert_relative_eq!(c2, 1.1081531344169884, max_relative = 1e-12);
        assert!(c1 <= c2);
    }

    #[test]
    fn codomain_descriptors() {
        assert_eq!(CodomainDesc::Grid { d: 2, m: 8 }.len(), 64);
        assert_eq!(CodomainDesc::Padded { d: 1, m: 8, factor: 4 }.len(), 32);
        assert_eq!(CodomainDesc::Sinogram { m: 8 }.len(), 128);
        assert_relative_eq!(CodomainDesc::Grid { d: 2, m: 8 }.cell_measure(), 1.0 / 64.0);
        assert_relative_eq!(
            CodomainDesc::Padded { d: 1, m: 8, factor: 4 }.cell_measure(),
            1.0 / 8.0
        );
        let geo = radon::RadonGeometry::new(8);
        assert_relative_eq!(
            CodomainDesc::Sinogram { m: 8 }.cell_measure(),
            geo.d_offset * geo.d_angle
        );
    }
}
