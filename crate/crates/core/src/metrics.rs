//! Inference-quality metrics: mean squared error against the planted signal,
//! support recovery ratios, Youden's index, and the one-standard-error rule.

use ndarray::ArrayView1;

use crate::error::{Error, Result};
use crate::model::{GroundTruth, LassoSolution};

/// Mean squared error rate `(1/N) ||x - x_hat||^2`.
pub fn mse(x: &ArrayView1<f64>, truth: &GroundTruth) -> Result<f64> {
    if x.len() != truth.x_hat.len() {
        return Err(Error::ShapeMismatch(format!(
            "estimate has {} entries, truth has {}",
            x.len(),
            truth.x_hat.len()
        )));
    }
    let n = x.len() as f64;
    Ok(x.iter()
        .zip(truth.x_hat.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n)
}

/// Support recovery ratios. A ratio is `None` when its denominator is empty
/// (no truly active, respectively no truly inactive, components).
#[derive(Debug, Clone, Copy)]
pub struct SupportMetrics {
    pub tp: Option<f64>,
    pub fp: Option<f64>,
}

/// True/false positive ratios of the solution's active set against the
/// planted support.
pub fn tp_fp(sol: &LassoSolution, truth: &GroundTruth) -> SupportMetrics {
    let mut active = vec![false; truth.x_hat.len()];
    for &i in &sol.active_set {
        active[i] = true;
    }
    let mut pos = 0usize;
    let mut neg = 0usize;
    let mut tp = 0usize;
    let mut fp = 0usize;
    for (i, &v) in truth.x_hat.iter().enumerate() {
        if v != 0.0 {
            pos += 1;
            if active[i] {
                tp += 1;
            }
        } else {
            neg += 1;
            if active[i] {
                fp += 1;
            }
        }
    }
    SupportMetrics {
        tp: (pos > 0).then(|| tp as f64 / pos as f64),
        fp: (neg > 0).then(|| fp as f64 / neg as f64),
    }
}

/// Youden's index `D = (TP - FP)^2 / 2`, the closed form of
/// `min_x {(TP - x)^2 + (FP - x)^2}` attained at `x = (TP + FP) / 2`.
pub fn youden(tp: f64, fp: f64) -> f64 {
    let d = tp - fp;
    0.5 * d * d
}

/// One-standard-error rule over `(lambda, looe, std_error)` triples: the
/// largest lambda whose error lies within one standard error of the minimum.
/// Ties at the minimum break toward larger lambda.
pub fn one_standard_error(points: &[(f64, f64, f64)]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput("one_standard_error points".into()));
    }
    if points
        .iter()
        .any(|(l, e, s)| !l.is_finite() || !e.is_finite() || !s.is_finite())
    {
        return Err(Error::NonFinite("one_standard_error points".into()));
    }
    let mut best: Option<(f64, f64, f64)> = None;
    for &(l, e, s) in points {
        let better = match best {
            None => true,
            Some((bl, be, _)) => e < be || (e == be && l > bl),
        };
        if better {
            best = Some((l, e, s));
        }
    }
    let (_, min_e, min_s) = best.unwrap();
    let threshold = min_e + min_s;
    let lam = points
        .iter()
        .filter(|(_, e, _)| *e <= threshold)
        .map(|(l, _, _)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(lam)
}
