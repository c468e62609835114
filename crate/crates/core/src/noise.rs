//! Observation simulation for the white-noise and regression models, the
//! multiscale threshold γ_n, and the Gaussian maximal tail bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::operators::CodomainSignal;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    /// dY = Tf dx + (σ/√n) dW on the codomain window: i.i.d. cell Gaussians
    /// with variance σ²/(n·w) for cell measure w, so that quadrature inner
    /// products satisfy ⟨u, dW⟩ ~ N(0, ‖u‖²_{L2}).
    WhiteNoise,
    /// y_i = (Tf)(x_i) + σ ε_i at the n = #cells design points (Eq. (19));
    /// coincides bit-for-bit with white noise when n·w = 1.
    Regression,
}

/// One noisy realization of the data Tf.
#[derive(Debug, Clone)]
pub struct Observation {
    pub model: NoiseModel,
    pub data: CodomainSignal,
    pub n: usize,
    pub sigma: f64,
    pub seed: u64,
}

/// Draws the observation for the given noiseless data Tf. Deterministic in
/// `seed`: one counter-based stream per call, consumed cell by cell, so the
/// result is independent of thread count. `sigma = 0` returns Tf exactly.
pub fn simulate(
    tf: &CodomainSignal,
    n: usize,
    sigma: f64,
    model: NoiseModel,
    seed: u64,
) -> Result<Observation> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::invalid("sigma", "noise scale must be finite and ≥ 0"));
    }
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::invalid("n", "sample size must be a power of two"));
    }
    if model == NoiseModel::Regression && n != tf.desc.len() {
        return Err(Error::invalid(
            "n",
            format!("regression mode needs n = #cells = {}, got {n}", tf.desc.len()),
        ));
    }
    let scale = match model {
        NoiseModel::WhiteNoise => sigma / (n as f64 * tf.desc.cell_measure()).sqrt(),
        NoiseModel::Regression => sigma,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = tf
        .values
        .iter()
        .map(|&v| {
            let eps: f64 = StandardNormal.sample(&mut rng);
            v + scale * eps
        })
        .collect();
    Ok(Observation { model, data: CodomainSignal::new(tf.desc, values)?, n, sigma, seed })
}

/// Threshold γ_n = κ·c2·σ·√(2·ln(count)/n) of Eq. (15); `count` is the size
/// of the dictionary the maximum runs over.
pub fn threshold_gamma(n: usize, sigma: f64, kappa: f64, c2: f64, count: usize) -> Result<f64> {
    if count < 2 {
        return Err(Error::invalid("count", "threshold needs at least 2 dictionary elements"));
    }
    if !(kappa > 0.0) {
        return Err(Error::invalid("kappa", "threshold multiplier must be positive"));
    }
    if n == 0 {
        return Err(Error::invalid("n", "sample size must be positive"));
    }
    Ok(kappa * c2 * sigma * (2.0 * (count as f64).ln() / n as f64).sqrt())
}

/// Union tail bound min(1, count·e^{−t²/2}) on P(max_ω |⟨u_ω, dW⟩|/‖u_ω‖ ≥ t)
/// for `count` jointly Gaussian coefficients.
pub fn good_event_bound(t: f64, count: usize) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::invalid("t", "tail point must be ≥ 0"));
    }
    Ok((count as f64 * (-t * t / 2.0).exp()).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{OperatorModel, VagueletteDict, VagueletteMode};
    use crate::wavelets::{index_set_omega_n, WaveletBasis, WaveletIndex};
    use approx::assert_relative_eq;

    fn flat_data(m: usize) -> CodomainSignal {
        let op = OperatorModel::identity(1);
        CodomainSignal::new(op.codomain(m), vec![1.0; m]).unwrap()
    }

    #[test]
    fn sigma_zero_is_noiseless() {
        let tf = flat_data(64);
        let obs = simulate(&tf, 64, 0.0, NoiseModel::WhiteNoise, 3).unwrap();
        assert_eq!(obs.data.values, tf.values);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let tf = flat_data(128);
        let a = simulate(&tf, 128, 0.3, NoiseModel::WhiteNoise, 42).unwrap();
        let b = simulate(&tf, 128, 0.3, NoiseModel::WhiteNoise, 42).unwrap();
        assert_eq!(a.data.values, b.data.values);
        let c = simulate(&tf, 128, 0.3, NoiseModel::WhiteNoise, 43).unwrap();
        assert_ne!(a.data.values, c.data.values);
    }

    #[test]
    fn regression_matches_white_noise_when_n_is_cell_count() {
        // n·w = 1 makes the two models literally the same draw.
        let tf = flat_data(256);
        let a = simulate(&tf, 256, 0.2, NoiseModel::WhiteNoise, 9).unwrap();
        let b = simulate(&tf, 256, 0.2, NoiseModel::Regression, 9).unwrap();
        assert_eq!(a.data.values, b.data.values);
    }

    #[test]
    fn invalid_inputs_are_rejected()  {
        let tf = flat_data(64);
        assert!(simulate(&tf, 64, -1.0, NoiseModel::WhiteNoise, 0).is_err());
        assert!(simulate(&tf, 63, 1.0, NoiseModel::WhiteNoise, 0).is_err());
        assert!(simulate(&tf, 128, 1.0, NoiseModel::Regression, 0).is_err());
        assert!(threshold_gamma(1024, 1.0, 1.5, 1.0, 1).is_err());
        assert!(threshold_gamma(1024, 1.0, 0.0, 1.0, 1024).is_err());
        assert!(good_event_bound(-0.1, 10).is_err());
    }

    #[test]
    fn threshold_examples() {
        let g = threshold_gamma(1024, 1.0, 1.0, 1.0, 1024).unwrap();
        assert_relative_eq!(g, (2.0 * 1024f64.ln() / 1024.0).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(g, 0.11635, max_relative = 1e-4);
        let g = threshold_gamma(4096, 0.1, 1.5, 1.0, 2048).unwrap();
        assert_relative_eq!(g, 0.0091524, max_relative = 1e-4);
        // Linearity in sigma.
        let g2 = threshold_gamma(4096, 0.2, 1.5, 1.0, 2048).unwrap();
        assert_relative_eq!(g2, 2.0 * g, epsilon = 1e-15);
    }

    #[test]
    fn good_event_bound_examples() {
        assert_eq!(good_event_bound(0.0, 1024).unwrap(), 1.0);
        let t = (2.0 * 1024f64.ln()).sqrt() * 1.5;
        assert_relative_eq!(
            good_event_bound(t, 1024).unwrap(),
            1024f64.powf(-1.25),
            max_relative = 1e-12
        );
    }

    #[test]
    fn coefficient_noise_variance_matches_white_noise_calculus() {
        // Identity operator: ⟨u_ω, dY⟩ − κ⟨ψ_ω, Tf⟩ should have variance
        // σ²‖ψ_ω‖²/n; Monte-Carlo over 10⁴ seeds, wavelet fully interior so
        // ‖ψ_ω‖ = 1.
        let m = 256;
        let n = 256;
        let sigma = 0.7;
        let basis = WaveletBasis::new(4, 1).unwrap();
        let op = OperatorModel::identity(1);
        let omega = index_set_omega_n(n, 1, &basis).unwrap();
        let dict =
            VagueletteDict::build(&op, &basis, &omega, m, VagueletteMode::ExactDiscrete).unwrap();
        let target = WaveletIndex { j: 4, k: [2, 0], e: [1, 0] };
        let pos = dict.indices().iter().position(|i| *i == target).unwrap();
        let tf = CodomainSignal::zeros(op.codomain(m));
        let trials = 10_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for seed in 0..trials {
            let obs = simulate(&tf, n, sigma, NoiseModel::WhiteNoise, seed).unwrap();
            let c = dict.coeffs(&obs.data).unwrap()[pos];
            sum += c;
            sum_sq += c * c;
        }
        let tn = trials as f64;
        let var = sum_sq / tn - (sum / tn).powi(2);
        let expect = sigma * sigma / n as f64;
        assert_relative_eq!(var, expect, max_relative = 0.05);
    }

    #[test]
    fn coefficient_noise_covariance_matches_inner_products() {
        // Cov(⟨ψ_a, ε⟩, ⟨ψ_b, ε⟩) = (σ²/n)·⟨ψ_a, ψ_b⟩ = 0 for distinct
        // orthonormal wavelets; checked within 3 standard errors.
        let m = 128;
        let n = 128;
        let sigma = 1.0;
        let basis = WaveletBasis::new(2, 1).unwrap();
        let op = OperatorModel::identity(1);
        let omega = index_set_omega_n(n, 1, &basis).unwrap();
        let dict =
            VagueletteDict::build(&op, &basis, &omega, m, VagueletteMode::ExactDiscrete).unwrap();
        let a = WaveletIndex { j: 3, k: [3, 0], e: [1, 0] };
        let b = WaveletIndex { j: 4, k: [7, 0], e: [1, 0] };
        let pa = dict.indices().iter().position(|i| *i == a).unwrap();
        let pb = dict.indices().iter().position(|i| *i == b).unwrap();
        let tf = CodomainSignal::zeros(op.codomain(m));
        let trials = 10_000;
        let (mut sa, mut sb, mut sab) = (0.0, 0.0, 0.0);
        for seed in 0..trials {
            let obs = simulate(&tf, n, sigma, NoiseModel::WhiteNoise, seed).unwrap();
            let c = dict.coeffs(&obs.data).unwrap();
            sa += c[pa];
            sb += c[pb];
            sab += c[pa] * c[pb];
        }
        let tn = trials as f64;
        let cov = sab / tn - sa / tn * sb / tn;
        // Var of the empirical covariance of two independent N(0, σ²/n)
        // variables is (σ²/n)²/trials.
        let se = sigma * sigma / n as f64 / tn.sqrt();
        assert!(cov.abs() <= 3.0 * se, "cov {cov} exceeds 3·SE {se}");
    }
}
