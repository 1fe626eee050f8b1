//! Warm-started penalty sweeps of the equations of state, producing the
//! analytic curves (errors, ROC points, selection marks) for one ensemble.

use crate::error::{Error, Result};
use crate::metrics::youden;
use crate::model::RunConfig;
use crate::replica::eos::{analytic_looe, solve_eos1_warm, solve_eos2_warm};
use crate::replica::{ReplicaEnsemble, ReplicaParams};

/// One penalty point of the analytic sweep.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticPathPoint {
    pub lambda: f64,
    pub rho: f64,
    pub tp: f64,
    pub fp: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub looe1: f64,
    pub looe2_correct: f64,
    pub looe2_incorrect: f64,
    pub mse1: f64,
    pub mse2: f64,
    pub youden_d: f64,
    pub converged: bool,
}

/// Sweep output plus the three marked selection points (indices into
/// `points`, excluding non-converged entries).
#[derive(Debug, Clone)]
pub struct AnalyticSweep {
    pub points: Vec<AnalyticPathPoint>,
    pub argmin_looe1: Option<usize>,
    pub argmin_looe2: Option<usize>,
    pub argmax_youden: Option<usize>,
}

/// Solves both equation-of-state systems along a strictly descending
/// penalty grid, warm-starting each point from the previous one.
/// Non-converged points are kept in the output, flagged, and excluded from
/// the argmin/argmax searches.
pub fn sweep_lambda(
    ens: &ReplicaEnsemble,
    lambda_grid: &[f64],
    cfg: &RunConfig,
) -> Result<AnalyticSweep> {
    if lambda_grid.is_empty() {
        return Err(Error::EmptyInput("lambda grid".into()));
    }
    if !lambda_grid.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::InvalidConfig(
            "lambda grid must be strictly descending".into(),
        ));
    }
    ens.validate()?;

    let mut points = Vec::with_capacity(lambda_grid.len());
    let mut warm1 = None;
    let mut warm2 = None;
    for &lambda in lambda_grid {
        let p = ReplicaParams::from_ensemble(ens, lambda);
        let s1 = match solve_eos1_warm(&p, cfg, warm1) {
            Ok(s) => s,
            Err(Error::Eos1NonConvergence { last }) => {
                points.push(failed_point(lambda, &last));
                continue;
            }
            Err(e) => return Err(e),
        };
        warm1 = Some((s1.chi1, s1.q1, s1.m1));
        let s2 = match solve_eos2_warm(&p, &s1, cfg, warm2) {
            Ok(s) => s,
            Err(Error::Eos2NonConvergence { .. }) => {
                points.push(AnalyticPathPoint {
                    lambda,
                    rho: s1.rho,
                    tp: s1.tp,
                    fp: s1.fp,
                    eps1: s1.eps1,
                    eps2: f64::NAN,
                    looe1: 0.5 * s1.m1_tilde,
                    looe2_correct: f64::NAN,
                    looe2_incorrect: f64::NAN,
                    mse1: s1.m1_tilde - ens.sigma_xi2,
                    mse2: f64::NAN,
                    youden_d: youden(s1.tp, s1.fp),
                    converged: false,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        warm2 = Some((s2.chi2, s2.q2, s2.m2, s2.chi_c, s2.q_c));
        let (looe1, looe2_correct, looe2_incorrect) = analytic_looe(&p, &s1, &s2);
        points.push(AnalyticPathPoint {
            lambda,
            rho: s1.rho,
            tp: s1.tp,
            fp: s1.fp,
            eps1: s1.eps1,
            eps2: s2.eps2,
            looe1,
            looe2_correct,
            looe2_incorrect,
            mse1: s1.m1_tilde - ens.sigma_xi2,
            mse2: s2.m2_tilde - ens.sigma_xi2,
            youden_d: youden(s1.tp, s1.fp),
            converged: true,
        });
    }

    let argmin = |f: fn(&AnalyticPathPoint) -> f64| {
        points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.converged && f(p).is_finite())
            .min_by(|(_, a), (_, b)| f(a).partial_cmp(&f(b)).unwrap())
            .map(|(i, _)| i)
    };
    let argmax_youden = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.converged)
        .max_by(|(_, a), (_, b)| a.youden_d.partial_cmp(&b.youden_d).unwrap())
        .map(|(i, _)| i);

    Ok(AnalyticSweep {
        argmin_looe1: argmin(|p| p.looe1),
        argmin_looe2: argmin(|p| p.looe2_correct),
        argmax_youden,
        points,
    })
}

fn failed_point(lambda: f64, last: &crate::replica::ReplicaState1) -> AnalyticPathPoint {
    AnalyticPathPoint {
        lambda,
        rho: last.rho,
        tp: last.tp,
        fp: last.fp,
        eps1: f64::NAN,
        eps2: f64::NAN,
        looe1: f64::NAN,
        looe2_correct: f64::NAN,
        looe2_incorrect: f64::NAN,
        mse1: f64::NAN,
        mse2: f64::NAN,
        youden_d: f64::NAN,
        converged: false,
    }
}

/// Log-spaced descending grid between two positive bounds, inclusive.
pub fn log_grid(hi: f64, lo: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::EmptyInput("lambda grid".into()));
    }
    if !(hi > lo && lo > 0.0 && hi.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "log grid needs hi > lo > 0, got hi = {hi}, lo = {lo}"
        )));
    }
    if count == 1 {
        return Ok(vec![hi]);
    }
    let lh = hi.ln();
    let ll = lo.ln();
    Ok((0..count)
        .map(|i| (lh + (ll - lh) * i as f64 / (count - 1) as f64).exp())
        .collect())
}
