//! Brute-force cross validation: the literal leave-one-out refits and
//! generic k-fold CV. Slow by construction — these are the oracles the fast
//! formulas are validated against, and the only honest way to get the
//! `Type2` (debiased-estimator) CV error.

use ndarray::Array1;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fast_loo::{mean_and_stderr, EstimatorKind, LooEstimate, LooMethod};
use crate::lasso::{debias, solve_lasso, solve_path};
use crate::model::{ProblemInstance, RunConfig};

/// Number of bootstrap resamples behind the k-fold error bars.
const KFOLD_RESAMPLES: usize = 200;

/// Literal leave-one-out error: one full solve per left-out observation,
/// warm-started from the full-data solution. Non-converged folds are
/// excluded from the mean and flag the estimate unstable.
pub fn naive_loo(
    inst: &ProblemInstance,
    lambda: f64,
    estimator: EstimatorKind,
    cfg: &RunConfig,
) -> Result<LooEstimate> {
    if inst.m() < 2 {
        return Err(Error::InvalidConfig(
            "leave-one-out needs at least two observations".into(),
        ));
    }
    cfg.validate()?;
    let (full, full_rep) = solve_lasso(inst, lambda, None, cfg);

    let fold_terms: Vec<Option<f64>> = (0..inst.m())
        .into_par_iter()
        .map(|mu| {
            let sub = inst.without_row(mu);
            let (sol, rep) = solve_lasso(&sub, lambda, Some(&full.x1), cfg);
            if !rep.converged {
                return None;
            }
            let x = match estimator {
                EstimatorKind::Type1 => sol.x1.clone(),
                EstimatorKind::Type2 => match debias(&sub, &sol) {
                    Ok(d) => d.x2.unwrap(),
                    Err(_) => return None,
                },
            };
            let pred = inst.a().row(mu).dot(&x);
            let r = inst.y()[mu] - pred;
            Some(0.5 * r * r)
        })
        .collect();

    let excluded = fold_terms.iter().filter(|t| t.is_none()).count();
    let terms: Vec<f64> = fold_terms.into_iter().flatten().collect();
    if terms.is_empty() {
        return Err(Error::EmptyInput("all leave-one-out folds failed".into()));
    }
    let (looe, std_error) = mean_and_stderr(&terms);
    Ok(LooEstimate {
        lambda,
        looe,
        per_mu_terms: terms,
        std_error,
        method: LooMethod::Naive,
        estimator,
        unstable: excluded > 0 || !full_rep.converged,
        known_biased: false,
    })
}

/// Deterministic shuffled partition of `0..m` into `k` folds whose sizes
/// differ by at most one.
pub fn fold_partition(m: usize, k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let base = m / k;
    let extra = m % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[start..start + len].to_vec());
        start += len;
    }
    folds
}

/// k-fold cross validation over a descending penalty grid. Per penalty, the
/// per-observation terms come from the fold that held the observation out;
/// the error bar is a Monte-Carlo resampling standard deviation of the mean.
pub fn kfold_cv(
    inst: &ProblemInstance,
    lambda_grid: &[f64],
    k: usize,
    estimator: EstimatorKind,
    seed: u64,
    cfg: &RunConfig,
) -> Result<Vec<LooEstimate>> {
    let m = inst.m();
    if k < 2 || k > m {
        return Err(Error::BadFoldCount { k, m });
    }
    if lambda_grid.is_empty() {
        return Err(Error::EmptyInput("lambda grid".into()));
    }
    if !lambda_grid.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::InvalidConfig("lambda grid must be strictly descending".into()));
    }
    cfg.validate()?;

    let folds = fold_partition(m, k, seed);

    // per fold: per lambda, Some(predictions for the held-out rows)
    struct FoldOutcome {
        held: Vec<usize>,
        per_lambda: Vec<Option<Vec<f64>>>,
    }

    let outcomes: Vec<FoldOutcome> = folds
        .par_iter()
        .map(|held| {
            let train: Vec<usize> = (0..m).filter(|i| !held.contains(i)).collect();
            let sub = inst.with_rows(&train);
            let mut fold_cfg = cfg.clone();
            fold_cfg.lambda_grid = lambda_grid.to_vec();
            let path = solve_path(&sub, &fold_cfg)?;
            let per_lambda = path
                .iter()
                .map(|(sol, rep)| {
                    if !rep.converged {
                        return None;
                    }
                    let x: Array1<f64> = match estimator {
                        EstimatorKind::Type1 => sol.x1.clone(),
                        EstimatorKind::Type2 => match debias(&sub, sol) {
                            Ok(d) => d.x2.unwrap(),
                            Err(_) => return None,
                        },
                    };
                    Some(held.iter().map(|&i| inst.a().row(i).dot(&x)).collect())
                })
                .collect();
            Ok(FoldOutcome {
                held: held.clone(),
                per_lambda,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut estimates = Vec::with_capacity(lambda_grid.len());
    for (li, &lambda) in lambda_grid.iter().enumerate() {
        let mut by_mu: Vec<Option<f64>> = vec![None; m];
        let mut unstable = false;
        for outcome in &outcomes {
            match &outcome.per_lambda[li] {
                Some(preds) => {
                    for (&i, &p) in outcome.held.iter().zip(preds.iter()) {
                        let r = inst.y()[i] - p;
                        by_mu[i] = Some(0.5 * r * r);
                    }
                }
                None => unstable = true,
            }
        }
        let terms: Vec<f64> = by_mu.into_iter().flatten().collect();
        if terms.is_empty() {
            return Err(Error::EmptyInput(format!("all folds failed at lambda = {lambda}")));
        }
        let mean = terms.iter().sum::<f64>() / terms.len() as f64;
        let std_error = resampled_stderr(&terms, seed, li as u64);
        estimates.push(LooEstimate {
            lambda,
            looe: mean,
            per_mu_terms: terms,
            std_error,
            method: LooMethod::KFold,
            estimator,
            unstable,
            known_biased: false,
        });
    }
    Ok(estimates)
}

fn resampled_stderr(terms: &[f64], seed: u64, lambda_index: u64) -> f64 {
    let n = terms.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1 + lambda_index);
    let mut means = Vec::with_capacity(KFOLD_RESAMPLES);
    for _ in 0..KFOLD_RESAMPLES {
        let mut sum = 0.0;
        for _ in 0..n {
            let idx = rand::Rng::random_range(&mut rng, 0..n);
            sum += terms[idx];
        }
        means.push(sum / n as f64);
    }
    let grand = means.iter().sum::<f64>() / KFOLD_RESAMPLES as f64;
    (means
        .iter()
        .map(|v| (v - grand) * (v - grand))
        .sum::<f64>()
        / (KFOLD_RESAMPLES - 1) as f64)
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{sample_instance, EnsembleSpec};
    use crate::lasso::lambda_max;
    use ndarray::array;

    fn cfg() -> RunConfig {
        RunConfig::default()
    }

    #[test]
    fn all_inactive_folds_give_response_energy() {
        let spec = EnsembleSpec {
            n: 20,
            alpha: 0.6,
            rho_hat: 0.3,
            sigma_x2: 1.0,
            sigma_xi2: 0.01,
            seed: 1,
        };
        let (inst, _) = sample_instance(&spec).unwrap();
        // above every fold's own lambda_max as well as the full one
        let lambda = 2.0 * lambda_max(&inst);
        let est = naive_loo(&inst, lambda, EstimatorKind::Type1, &cfg()).unwrap();
        let want = inst.y().iter().map(|v| 0.5 * v * v).sum::<f64>() / inst.m() as f64;
        assert!((est.looe - want).abs() < 1e-12 * (1.0 + want));
        assert!(!est.unstable);
    }

    #[test]
    fn identical_observations_interpolate_exactly() {
        // two copies of the same observation: each fold refits it exactly
        let inst = ProblemInstance::new(array![[1.0], [1.0]], array![1.0, 1.0]).unwrap();
        let est = naive_loo(&inst, 0.0, EstimatorKind::Type1, &cfg()).unwrap();
        assert!(est.looe < 1e-18, "looe = {}", est.looe);
    }

    #[test]
    fn kfold_equals_loo_when_k_is_m() {
        let spec = EnsembleSpec {
            n: 24,
            alpha: 0.5,
            rho_hat: 0.25,
            sigma_x2: 1.0,
            sigma_xi2: 0.01,
            seed: 6,
        };
        let (inst, _) = sample_instance(&spec).unwrap();
        let lambda = 0.3 * lambda_max(&inst);
        let loo = naive_loo(&inst, lambda, EstimatorKind::Type1, &cfg()).unwrap();
        let kf = kfold_cv(&inst, &[lambda], inst.m(), EstimatorKind::Type1, 17, &cfg()).unwrap();
        assert_eq!(kf[0].per_mu_terms.len(), loo.per_mu_terms.len());
        // terms are ordered by observation in both
        for (a, b) in kf[0].per_mu_terms.iter().zip(loo.per_mu_terms.iter()) {
            assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn fold_partition_is_a_partition() {
        let folds = fold_partition(23, 5, 99);
        assert_eq!(folds.len(), 5);
        let mut seen = [false; 23];
        for fold in &folds {
            for &i in fold {
                assert!(!seen[i], "index {i} appears twice");
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|s| *s));
        let sizes: Vec<usize> = folds.iter().map(|f| f.len()).collect();
        assert!(sizes.iter().all(|&s| s == 4 || s == 5));
        assert_eq!(fold_partition(23, 5, 99), folds); // deterministic
    }

    #[test]
    fn bad_fold_counts_are_rejected() {
        let inst = ProblemInstance::new(array![[1.0], [1.0], [1.0]], array![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            kfold_cv(&inst, &[0.1], 4, EstimatorKind::Type1, 0, &cfg()),
            Err(Error::BadFoldCount { .. })
        ));
        assert!(matches!(
            kfold_cv(&inst, &[0.1], 1, EstimatorKind::Type1, 0, &cfg()),
            Err(Error::BadFoldCount { .. })
        ));
    }
}
