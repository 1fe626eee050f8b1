//! Regularization paths for l1-penalized least squares with fast
//! leave-one-out cross-validation estimates.
//!
//! The crate bundles:
//!
//! - a warm-started coordinate-descent LASSO solver with KKT certificates
//!   and the least-squares refit on the active set ([`lasso`]);
//! - single-fit leave-one-out error approximations built on one active-set
//!   Gram inverse plus rank-one downdates, with per-observation error bars
//!   ([`fast_loo`]);
//! - the brute-force leave-one-out and k-fold oracles ([`naive_cv`]);
//! - a message-passing solver for both estimators ([`amp`]);
//! - analytic error/ROC curves for the i.i.d. Gaussian ensemble in the
//!   large-system limit ([`replica`]);
//! - synthetic data generation matching that ensemble ([`datagen`]) and
//!   selection metrics ([`metrics`]).

pub mod amp;
pub mod datagen;
pub mod error;
pub mod fast_loo;
pub mod lasso;
mod linalg;
pub mod metrics;
pub mod model;
pub mod naive_cv;
pub mod replica;

pub use error::{Error, Result};
pub use model::{
    normalize_grid, validate_instance, Diagnostic, GroundTruth, LassoSolution, ProblemInstance,
    RunConfig, Severity,
};
