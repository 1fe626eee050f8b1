//! `loocv synth`: finite-size experiments on the synthetic ensemble.
//! Samples are drawn from per-index generator streams and aggregated in
//! index order, so the output is byte-identical for any worker count.

use loocv_core::datagen::{sample_indexed, EnsembleSpec};
use loocv_core::fast_loo::{looe_approx1, looe_approx2, EstimatorKind};
use loocv_core::lasso::{debias, rss, solve_path};
use loocv_core::model::RunConfig;
use loocv_core::naive_cv::naive_loo;
use rayon::prelude::*;

use crate::args::{EstimatorArg, SynthArgs};
use crate::errors::{CliError, CliResult};
use crate::grids::{parse_lambda_spec, LambdaSpec};
use crate::records::{Emitter, SynthRecord};

struct CellSample {
    eps1: f64,
    eps2: f64,
    approx1: Option<f64>,
    approx2: Option<f64>,
    naive: Option<f64>,
    rho: f64,
    df: usize,
    tp: Option<f64>,
    fp: Option<f64>,
    clean: bool,
}

/// Mean and the error bar used for sample aggregates: the standard
/// deviation among samples divided by sqrt(count - 1).
fn mean_se(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    (mean, Some(var.sqrt() / ((n - 1) as f64).sqrt()))
}

fn opt_mean_se(values: &[Option<f64>]) -> (Option<f64>, Option<f64>) {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    if present.is_empty() {
        return (None, None);
    }
    let (m, s) = mean_se(&present);
    (Some(m), s)
}

pub fn run(args: &SynthArgs) -> CliResult<()> {
    let sizes: Vec<usize> = args
        .n
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::BadInput(format!("bad size '{t}'")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    if sizes.is_empty() {
        return Err(CliError::BadInput("no sizes given".into()));
    }
    if args.samples == 0 {
        return Err(CliError::BadInput("samples must be positive".into()));
    }

    let grid = match parse_lambda_spec(&args.lambdas)? {
        LambdaSpec::Explicit(g) => g,
        LambdaSpec::Auto(_) => {
            return Err(CliError::BadInput(
                "auto grids need a fixed dataset; give log:HI:LO:K or a list".into(),
            ))
        }
    };

    let mut cells = 0.0;
    for &n in &sizes {
        let m = (args.alpha * n as f64).round_ties_even();
        cells += n as f64 * m * args.samples as f64;
    }
    if cells > args.max_cells {
        return Err(CliError::ResourceGuard(format!(
            "requested work is {cells:.3e} cells, limit {:.3e} (raise --max-cells to override)",
            args.max_cells
        )));
    }

    let estimator = match args.estimator {
        EstimatorArg::Type1 => EstimatorKind::Type1,
        EstimatorArg::Type2 => EstimatorKind::Type2,
    };

    let mut emitter = Emitter::create(args.out.output.as_deref(), args.out.format)?;
    emitter.provenance("synth", args)?;

    let mut any_unclean = false;
    for &n in &sizes {
        let spec = EnsembleSpec {
            n,
            alpha: args.alpha,
            rho_hat: args.rho_hat,
            sigma_x2: args.sigma_x2,
            sigma_xi2: args.sigma_xi2,
            seed: args.seed,
        };
        spec.validate()?;
        let cfg = RunConfig {
            lambda_grid: grid.clone(),
            active_threshold: args.solver.active_threshold,
            solver_tol: args.solver.solver_tol,
            max_iter: args.solver.max_iter,
            damping: args.solver.damping,
            seed: args.seed,
        };
        cfg.validate()?;

        // one row of per-lambda outcomes per sample, in sample order
        let per_sample: Vec<Vec<CellSample>> = (0..args.samples)
            .into_par_iter()
            .map(|idx| -> CliResult<Vec<CellSample>> {
                let (inst, truth) = sample_indexed(&spec, idx)?;
                let path = solve_path(&inst, &cfg)?;
                let mut out = Vec::with_capacity(path.len());
                for (sol, rep) in &path {
                    let support = loocv_core::metrics::tp_fp(sol, &truth);
                    let deb = debias(&inst, sol)?;
                    let (_, eps1) = rss(&inst, &sol.x1);
                    let (_, eps2) = rss(&inst, deb.x2.as_ref().unwrap());
                    let mut clean = rep.converged;
                    let approx1 = match looe_approx1(&inst, &deb, estimator) {
                        Ok(e) => {
                            clean &= !e.unstable;
                            Some(e.looe)
                        }
                        Err(_) => {
                            clean = false;
                            None
                        }
                    };
                    let approx2 = match looe_approx2(&inst, &deb, estimator) {
                        Ok(e) => Some(e.looe),
                        Err(_) => {
                            clean = false;
                            None
                        }
                    };
                    let naive = if args.naive {
                        match naive_loo(&inst, sol.lambda, estimator, &cfg) {
                            Ok(e) => {
                                clean &= !e.unstable;
                                Some(e.looe)
                            }
                            Err(_) => {
                                clean = false;
                                None
                            }
                        }
                    } else {
                        None
                    };
                    out.push(CellSample {
                        eps1,
                        eps2,
                        approx1,
                        approx2,
                        naive,
                        rho: sol.rho,
                        df: sol.active_set.len(),
                        tp: support.tp,
                        fp: support.fp,
                        clean,
                    });
                }
                Ok(out)
            })
            .collect::<CliResult<Vec<_>>>()?;

        let m = spec.m();
        for (li, &lambda) in grid.iter().enumerate() {
            let col: Vec<&CellSample> = per_sample.iter().map(|row| &row[li]).collect();
            let (eps1_mean, eps1_se) = mean_se(&col.iter().map(|c| c.eps1).collect::<Vec<_>>());
            let (eps2_mean, eps2_se) =
                opt_mean_se(&col.iter().map(|c| Some(c.eps2)).collect::<Vec<_>>());
            let (a1_mean, a1_se) = opt_mean_se(&col.iter().map(|c| c.approx1).collect::<Vec<_>>());
            let (a2_mean, a2_se) = opt_mean_se(&col.iter().map(|c| c.approx2).collect::<Vec<_>>());
            let (nv_mean, nv_se) = opt_mean_se(&col.iter().map(|c| c.naive).collect::<Vec<_>>());
            let rho_mean = col.iter().map(|c| c.rho).sum::<f64>() / col.len() as f64;
            let df_mean = col.iter().map(|c| c.df as f64).sum::<f64>() / col.len() as f64;
            let (tp_mean, _) = opt_mean_se(&col.iter().map(|c| c.tp).collect::<Vec<_>>());
            let (fp_mean, _) = opt_mean_se(&col.iter().map(|c| c.fp).collect::<Vec<_>>());
            let unstable = col.iter().any(|c| !c.clean);
            any_unclean |= unstable;
            emitter.record(&SynthRecord {
                n,
                m,
                lambda,
                samples: col.len(),
                estimator: match estimator {
                    EstimatorKind::Type1 => 1,
                    EstimatorKind::Type2 => 2,
                },
                eps1_mean,
                eps1_se,
                eps2_mean,
                eps2_se,
                looe_approx1_mean: a1_mean,
                looe_approx1_se: a1_se,
                looe_approx2_mean: a2_mean,
                looe_approx2_se: a2_se,
                looe_naive_mean: nv_mean,
                looe_naive_se: nv_se,
                rho_mean,
                df_mean,
                tp_mean,
                fp_mean,
                unstable,
            })?;
        }
    }

    emitter.finish()?;
    if any_unclean {
        return Err(CliError::NonConvergence(
            "some sample/penalty cells were unstable or non-converged; aggregates exclude them"
                .into(),
        ));
    }
    Ok(())
}
