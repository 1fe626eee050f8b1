//! Analytic treatment of the i.i.d. Gaussian ensemble in the large-system
//! limit: order-parameter fixed points for both estimators and the derived
//! error, sparsity, and ROC curves.

mod eos;
mod special;
mod sweep;

pub use eos::{analytic_looe, solve_eos1, solve_eos1_warm, solve_eos2, solve_eos2_warm};
pub use special::{f_func, g_func, gauss_tail_moment, normal_pdf};
pub use sweep::{log_grid, sweep_lambda, AnalyticPathPoint, AnalyticSweep};

use crate::error::{Error, Result};

/// Generative parameters of the random ensemble, without a penalty value.
#[derive(Debug, Clone, Copy)]
pub struct ReplicaEnsemble {
    /// Aspect ratio `M/N`, strictly inside (0, 1): the analysis assumes
    /// fewer observations than predictors.
    pub alpha: f64,
    pub rho_hat: f64,
    pub sigma_x2: f64,
    pub sigma_xi2: f64,
}

impl ReplicaEnsemble {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::AlphaOutOfRange(self.alpha));
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

/// Ensemble parameters together with one penalty value.
#[derive(Debug, Clone, Copy)]
pub struct ReplicaParams {
    pub alpha: f64,
    pub rho_hat: f64,
    pub sigma_x2: f64,
    pub sigma_xi2: f64,
    pub lambda: f64,
}

impl ReplicaParams {
    pub fn from_ensemble(ens: &ReplicaEnsemble, lambda: f64) -> Self {
        Self {
            alpha: ens.alpha,
            rho_hat: ens.rho_hat,
            sigma_x2: ens.sigma_x2,
            sigma_xi2: ens.sigma_xi2,
            lambda,
        }
    }

    pub fn ensemble(&self) -> ReplicaEnsemble {
        ReplicaEnsemble {
            alpha: self.alpha,
            rho_hat: self.rho_hat,
            sigma_x2: self.sigma_x2,
            sigma_xi2: self.sigma_xi2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ensemble().validate()?;
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig("lambda must be positive".into()));
        }
        Ok(())
    }
}

/// Fixed point of the type-1 (penalized estimator) equations of state.
#[derive(Debug, Clone, Copy)]
pub struct ReplicaState1 {
    /// Susceptibility; equals `rho / (alpha - rho)` at a fixed point.
    pub chi1: f64,
    /// Squared length of the estimate.
    pub q1: f64,
    /// Overlap with the planted signal.
    pub m1: f64,
    pub chi1_hat: f64,
    /// Equals `alpha - rho` at a fixed point.
    pub q1_hat: f64,
    /// Coincides with `q1_hat`.
    pub m1_hat: f64,
    /// Activation threshold for truly active components.
    pub theta_a: f64,
    /// Activation threshold for truly inactive components.
    pub theta_i: f64,
    /// Sparsity of the inferred signal, `rho_hat * tp + (1 - rho_hat) * fp`.
    pub rho: f64,
    pub tp: f64,
    pub fp: f64,
    /// `rho_hat sigma_x2 - 2 m1 + q1 + sigma_xi2`; twice the type-1
    /// leave-one-out error.
    pub m1_tilde: f64,
    /// RSS rate, `chi1_hat / (2 alpha)`.
    pub eps1: f64,
}

/// Fixed point of the type-2 (debiased estimator) equations of state.
#[derive(Debug, Clone, Copy)]
pub struct ReplicaState2 {
    /// Coincides with `chi1` at a fixed point.
    pub chi2: f64,
    pub q2: f64,
    pub m2: f64,
    pub chi2_hat: f64,
    /// Equals `alpha - rho` at a fixed point.
    pub q2_hat: f64,
    pub m2_hat: f64,
    /// Cross-susceptibility between the two estimators.
    pub chi_c: f64,
    pub q_c: f64,
    pub chi_c_hat: f64,
    pub q_c_hat: f64,
    pub m2_tilde: f64,
    pub mc_tilde: f64,
    /// RSS rate of the debiased estimator, `chi2_hat / (2 alpha)`.
    pub eps2: f64,
}
