//! `loocv path`: fit a warm-started penalty path on user CSV data and
//! attach a leave-one-out error estimate per penalty by the chosen method.

use loocv_core::fast_loo::{looe_approx1, looe_approx2, EstimatorKind, LooEstimate};
use loocv_core::lasso::{debias, lambda_max, rss, solve_path};
use loocv_core::metrics::one_standard_error;
use loocv_core::model::{validate_instance, ProblemInstance, RunConfig, Severity};
use loocv_core::naive_cv::{kfold_cv, naive_loo};

use crate::args::{EstimatorArg, PathArgs};
use crate::errors::{CliError, CliResult};
use crate::grids::{parse_lambda_spec, resolve_auto, LambdaSpec};
use crate::io::{read_matrix, read_vector, standardize_columns};
use crate::records::{Emitter, PathRecord};

enum Method {
    Approx1,
    Approx2,
    Naive,
    KFold(usize),
}

fn parse_method(s: &str) -> CliResult<Method> {
    match s {
        "approx1" => Ok(Method::Approx1),
        "approx2" => Ok(Method::Approx2),
        "naive" => Ok(Method::Naive),
        _ => {
            if let Some(k) = s.strip_prefix("kfold:") {
                let k: usize = k
                    .parse()
                    .map_err(|_| CliError::BadInput(format!("bad fold count in '{s}'")))?;
                Ok(Method::KFold(k))
            } else {
                Err(CliError::BadInput(format!(
                    "unknown method '{s}' (approx1|approx2|naive|kfold:K)"
                )))
            }
        }
    }
}

pub fn run(args: &PathArgs) -> CliResult<()> {
    let mut a = read_matrix(&args.a, args.header)?;
    let y = read_vector(&args.y, args.header)?;
    if args.standardize {
        standardize_columns(&mut a);
    }

    for d in validate_instance(&a.view(), &y.view()) {
        match d.severity {
            Severity::Error => return Err(CliError::BadInput(d.message)),
            Severity::Warning => eprintln!("warning: {}", d.message),
        }
    }
    let inst = ProblemInstance::new(a, y)?;

    let method = parse_method(&args.method)?;
    let estimator = match args.estimator {
        EstimatorArg::Type1 => EstimatorKind::Type1,
        EstimatorArg::Type2 => EstimatorKind::Type2,
    };
    if estimator == EstimatorKind::Type2 {
        match method {
            Method::Approx1 | Method::Approx2 => eprintln!(
                "warning: fast approximations of the type-2 error are known-biased; \
                 use --method naive for the honest value"
            ),
            Method::Naive => eprintln!(
                "note: the type-2 error has no valid fast approximation; \
                 running {} full refits per lambda",
                inst.m()
            ),
            Method::KFold(_) => {}
        }
    }

    let grid = match parse_lambda_spec(&args.lambdas)? {
        LambdaSpec::Explicit(g) => g,
        LambdaSpec::Auto(count) => resolve_auto(count, lambda_max(&inst))?,
    };

    let cfg = RunConfig {
        lambda_grid: grid.clone(),
        active_threshold: args.solver.active_threshold,
        solver_tol: args.solver.solver_tol,
        max_iter: args.solver.max_iter,
        damping: args.solver.damping,
        seed: args.seed,
    };
    cfg.validate()?;

    let path = solve_path(&inst, &cfg)?;
    let mut any_nonconverged = path.iter().any(|(_, rep)| !rep.converged);

    // k-fold computes the whole grid in one pass (fold-wise warm starts)
    let kfold_estimates = if let Method::KFold(k) = method {
        Some(kfold_cv(&inst, &grid, k, estimator, args.seed, &cfg)?)
    } else {
        None
    };

    let mut emitter = Emitter::create(args.out.output.as_deref(), args.out.format)?;
    emitter.provenance("path", args)?;

    let mut selection: Vec<(f64, f64, f64)> = Vec::new();
    let mut dfs: Vec<usize> = Vec::new();
    for (idx, (sol, rep)) in path.iter().enumerate() {
        let deb = debias(&inst, sol)?;
        let (_, rss1) = rss(&inst, &sol.x1);
        let (_, rss2) = rss(&inst, deb.x2.as_ref().unwrap());

        let est: Option<LooEstimate> = match method {
            Method::Approx1 => match looe_approx1(&inst, &deb, estimator) {
                Ok(e) => Some(e),
                Err(loocv_core::Error::PrefactorSingular { .. }) => None,
                Err(e) => return Err(e.into()),
            },
            Method::Approx2 => match looe_approx2(&inst, &deb, estimator) {
                Ok(e) => Some(e),
                Err(loocv_core::Error::PrefactorSingular { .. }) => None,
                Err(e) => return Err(e.into()),
            },
            Method::Naive => Some(naive_loo(&inst, sol.lambda, estimator, &cfg)?),
            Method::KFold(_) => kfold_estimates.as_ref().map(|v| v[idx].clone()),
        };

        let unstable = est.as_ref().map(|e| e.unstable).unwrap_or(true) || !rep.converged;
        any_nonconverged |= unstable;
        if let Some(e) = &est {
            if !e.unstable && rep.converged {
                selection.push((sol.lambda, e.looe, e.std_error));
                dfs.push(sol.active_set.len());
            }
        }
        emitter.record(&PathRecord {
            lambda: sol.lambda,
            df: sol.active_set.len(),
            rho: sol.rho,
            rss1,
            rss2: Some(rss2),
            looe: est.as_ref().map(|e| e.looe),
            looe_se: est.as_ref().map(|e| e.std_error),
            method: args.method.clone(),
            estimator: match estimator {
                EstimatorKind::Type1 => 1,
                EstimatorKind::Type2 => 2,
            },
            unstable,
            known_biased: est.as_ref().map(|e| e.known_biased).unwrap_or(false),
        })?;
    }

    if selection.len() >= 2 {
        let (best_idx, _) = selection
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let (lam_min, looe_min, _) = selection[best_idx];
        let lam_1se = one_standard_error(&selection)?;
        let df_min = dfs[best_idx];
        let df_1se = selection
            .iter()
            .position(|(l, _, _)| *l == lam_1se)
            .map(|i| dfs[i])
            .unwrap_or(df_min);
        eprintln!(
            "argmin lambda = {lam_min:.6e} (looe = {looe_min:.6e}, df = {df_min}); \
             one-standard-error lambda = {lam_1se:.6e} (df = {df_1se})"
        );
    }

    emitter.finish()?;
    if any_nonconverged {
        return Err(CliError::NonConvergence(
            "some penalties did not certify; records were still written".into(),
        ));
    }
    Ok(())
}
