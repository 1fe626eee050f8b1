//! Synthetic instances from the random ensemble used throughout the crate:
//! i.i.d. Gaussian design with variance 1/N, Bernoulli–Gaussian signal,
//! Gaussian noise.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{GroundTruth, ProblemInstance};

/// Parameters of the synthetic ensemble.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleSpec {
    pub n: usize,
    /// Aspect ratio in (0, 1); the number of observations is `round(alpha * n)`.
    pub alpha: f64,
    /// Planted sparsity in [0, 1].
    pub rho_hat: f64,
    pub sigma_x2: f64,
    pub sigma_xi2: f64,
    pub seed: u64,
}

impl EnsembleSpec {
    /// Number of observations, `round(alpha * N)` with ties to even.
    pub fn m(&self) -> usize {
        (self.alpha * self.n as f64).round_ties_even() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("N must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig("alpha must lie in (0, 1)".into()));
        }
        if self.m() == 0 {
            return Err(Error::InvalidConfig("alpha * N rounds to zero observations".into()));
        }
        if !(0.0..=1.0).contains(&self.rho_hat) {
            return Err(Error::InvalidConfig("rho_hat must lie in [0, 1]".into()));
        }
        if self.sigma_x2.is_nan() || self.sigma_x2 <= 0.0 {
            return Err(Error::InvalidConfig("sigma_x2 must be positive".into()));
        }
        if self.sigma_xi2.is_nan() || self.sigma_xi2 < 0.0 {
            return Err(Error::InvalidConfig("sigma_xi2 must be non-negative".into()));
        }
        Ok(())
    }
}

/// Draws one instance. Deterministic given the spec (sample index 0).
pub fn sample_instance(spec: &EnsembleSpec) -> Result<(ProblemInstance, GroundTruth)> {
    sample_indexed(spec, 0)
}

/// Draws the `index`-th instance of the stream derived from `spec.seed`.
/// Distinct indices use disjoint generator streams, so samples can be drawn
/// in parallel and in any order while staying bitwise reproducible.
pub fn sample_indexed(spec: &EnsembleSpec, index: u64) -> Result<(ProblemInstance, GroundTruth)> {
    spec.validate()?;
    let m = spec.m();
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);

    let scale = (1.0 / n as f64).sqrt();
    let mut a = Array2::zeros((m, n));
    for mu in 0..m {
        for i in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            a[[mu, i]] = scale * z;
        }
    }

    let sigma_x = spec.sigma_x2.sqrt();
    let mut x_hat = Array1::zeros(n);
    for i in 0..n {
        let u: f64 = rng.random();
        let z: f64 = StandardNormal.sample(&mut rng);
        if u < spec.rho_hat {
            x_hat[i] = sigma_x * z;
        }
    }

    let sigma_xi = spec.sigma_xi2.sqrt();
    let mut xi = Array1::zeros(m);
    if spec.sigma_xi2 > 0.0 {
        for mu in 0..m {
            let z: f64 = StandardNormal.sample(&mut rng);
            xi[mu] = sigma_xi * z;
        }
    }

    let y = a.dot(&x_hat) + &xi;
    let inst = ProblemInstance::new(a, y)?;
    let truth = GroundTruth {
        x_hat,
        xi,
        rho_hat: spec.rho_hat,
        sigma_x2: spec.sigma_x2,
        sigma_xi2: spec.sigma_xi2,
    };
    Ok((inst, truth))
}
