//! Synthetic bandlimited signals with additive Gaussian noise.
//!
//! A draw picks spectral coefficients on the first `f` frequencies from
//! `N(0, c₁·I)` with `c₁ = n·signal_power/f` — so the clean signal carries
//! `signal_power` per vertex on average — and adds i.i.d. `N(0, noise_power)`
//! noise per vertex.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{mix, rng_from, tag};
use crate::spectral::EigenOracle;

/// One synthetic draw: spectral coefficients, the clean bandlimited signal,
/// and its noisy observation.
#[derive(Debug, Clone)]
pub struct SyntheticSignal {
    /// Coefficients on the first `f` frequencies (ascending eigenvalues).
    pub coefficients: Vec<f64>,
    /// Noise-free bandlimited signal `x = U_F x̃`.
    pub x: Vec<f64>,
    /// Observed signal `x + noise`.
    pub noisy: Vec<f64>,
}

impl SyntheticSignal {
    pub fn bandwidth(&self) -> usize {
        self.coefficients.len()
    }
}

/// Draws a signal with unit per-vertex power and noise variance 0.1.
pub fn gen_signal(oracle: &EigenOracle, f: usize, seed: u64) -> Result<SyntheticSignal> {
    gen_signal_with_powers(oracle, f, 1.0, 0.1, seed)
}

/// Draws a signal with the given per-vertex signal power and per-vertex noise
/// variance. Bit-identical output per seed: coefficients are drawn first,
/// then the `n` noise values, from one seeded stream.
pub fn gen_signal_with_powers(
    oracle: &EigenOracle,
    f: usize,
    signal_power: f64,
    noise_power: f64,
    seed: u64,
) -> Result<SyntheticSignal> {
    let n = oracle.n();
    if f == 0 || f > n {
        return Err(Error::InvalidParameter(format!(
            "bandwidth must be in [1, {n}], got {f}"
        )));
    }
    if !(signal_power.is_finite() && signal_power > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "signal power must be positive, got {signal_power}"
        )));
    }
    if !(noise_power.is_finite() && noise_power >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise power must be nonnegative, got {noise_power}"
        )));
    }
    let mut rng = rng_from(mix(seed, tag::SIGNAL));
    let coeff_sd = (n as f64 * signal_power / f as f64).sqrt();
    let coefficients: Vec<f64> = (0..f)
        .map(|_| coeff_sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let u = oracle.u();
    let mut x = vec![0.0; n];
    for (j, &c) in coefficients.iter().enumerate() {
        for i in 0..n {
            x[i] += c * u[(i, j)];
        }
    }
    let noise_sd = noise_power.sqrt();
    let noisy: Vec<f64> = x
        .iter()
        .map(|&v| v + noise_sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(SyntheticSignal {
        coefficients,
        x,
        noisy,
    })
}
