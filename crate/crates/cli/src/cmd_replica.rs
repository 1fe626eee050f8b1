//! `loocv replica`: analytic large-system curves plus the three marked
//! selection points (error minima and the Youden optimum).

use loocv_core::model::RunConfig;
use loocv_core::replica::{sweep_lambda, ReplicaEnsemble};
use serde_json::json;

use crate::args::ReplicaArgs;
use crate::errors::{CliError, CliResult};
use crate::grids::{parse_lambda_spec, LambdaSpec};
use crate::records::{Emitter, ReplicaRecord};

pub fn run(args: &ReplicaArgs) -> CliResult<()> {
    let ens = ReplicaEnsemble {
        alpha: args.alpha,
        rho_hat: args.rho_hat,
        sigma_x2: args.sigma_x2,
        sigma_xi2: args.sigma_xi2,
    };
    ens.validate()?;

    let grid = match parse_lambda_spec(&args.lambdas)? {
        LambdaSpec::Explicit(g) => g,
        LambdaSpec::Auto(_) => {
            return Err(CliError::BadInput(
                "auto grids need data; give log:HI:LO:K or an explicit list".into(),
            ))
        }
    };

    let cfg = RunConfig {
        max_iter: args.max_iter,
        damping: args.damping,
        ..RunConfig::default()
    };
    cfg.validate()?;

    let sweep = sweep_lambda(&ens, &grid, &cfg)?;

    let mut emitter = Emitter::create(args.out.output.as_deref(), args.out.format)?;
    emitter.provenance("replica", args)?;

    let tp_defined = args.rho_hat > 0.0;
    for p in &sweep.points {
        emitter.record(&ReplicaRecord {
            lambda: p.lambda,
            rho: p.rho,
            tp: tp_defined.then_some(p.tp),
            fp: p.fp,
            eps1: p.eps1,
            eps2: p.eps2,
            looe1: p.looe1,
            looe2_correct: p.looe2_correct,
            looe2_incorrect: p.looe2_incorrect,
            mse1: p.mse1,
            mse2: p.mse2,
            youden: p.youden_d,
            converged: p.converged,
        })?;
    }

    if sweep.points.len() >= 2 {
        let mut mark = |name: &str, idx: Option<usize>| -> CliResult<()> {
            if let Some(i) = idx {
                let p = &sweep.points[i];
                emitter.aux(&json!({
                    "mark": name,
                    "lambda": p.lambda,
                    "rho": p.rho,
                    "fp": p.fp,
                    "tp": tp_defined.then_some(p.tp),
                }))?;
                eprintln!(
                    "{name}: lambda = {:.6e}, rho = {:.4}, (FP, TP) = ({:.4}, {:.4})",
                    p.lambda, p.rho, p.fp, p.tp
                );
            }
            Ok(())
        };
        mark("min_looe1", sweep.argmin_looe1)?;
        mark("min_looe2_correct", sweep.argmin_looe2)?;
        mark("max_youden", sweep.argmax_youden)?;
    }

    emitter.finish()?;
    if sweep.points.iter().any(|p| !p.converged) {
        return Err(CliError::NonConvergence(
            "equations of state failed at some penalties; records were still written".into(),
        ));
    }
    Ok(())
}
