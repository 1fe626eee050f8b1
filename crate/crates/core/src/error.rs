use thiserror::Error;

use crate::replica::{ReplicaState1, ReplicaState2};

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("debiased estimate x2 is required but missing; call debias first")]
    MissingDebiased,

    #[error("prefactor singular at rho = alpha (rho = {rho}, alpha = {alpha})")]
    PrefactorSingular { rho: f64, alpha: f64 },

    #[error("fold count k = {k} out of range 2..={m}")]
    BadFoldCount { k: usize, m: usize },

    #[error("replica equations require alpha < 1, got {0}")]
    AlphaOutOfRange(f64),

    #[error("type-1 equations of state did not converge after damping escalation")]
    Eos1NonConvergence { last: Box<ReplicaState1> },

    #[error("type-2 equations of state did not converge after damping escalation")]
    Eos2NonConvergence { last: Box<ReplicaState2> },
}

pub type Result<T> = std::result::Result<T, Error>;
