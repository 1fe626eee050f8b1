//! Oracle equivalence and certificate checks for the coordinate-descent
//! solver against an independent accelerated proximal-gradient solve.

mod common;

use loocv_core::datagen::{sample_instance, EnsembleSpec};
use loocv_core::lasso::{kkt_residual, lambda_max, solve_lasso, solve_path};
use loocv_core::model::RunConfig;

fn spec(n: usize, alpha: f64, seed: u64) -> EnsembleSpec {
    EnsembleSpec {
        n,
        alpha,
        rho_hat: 0.2,
        sigma_x2: 1.0,
        sigma_xi2: 0.01,
        seed,
    }
}

#[test]
fn matches_proximal_gradient_oracle_to_1e6() {
    let (inst, _) = sample_instance(&spec(40, 0.5, 0)).unwrap();
    let cfg = RunConfig::default();
    for frac in [0.5, 0.2, 0.05] {
        let lambda = frac * lambda_max(&inst);
        let (sol, rep) = solve_lasso(&inst, lambda, None, &cfg);
        assert!(rep.converged);
        let oracle = common::fista_lasso(inst.a(), inst.y(), lambda, 1e-12, 2_000_000);
        let diff = (&sol.x1 - &oracle)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(diff < 1e-6, "lambda fraction {frac}: linf diff {diff}");
    }
}

#[test]
fn kkt_certificate_holds_on_random_instances() {
    let cfg = RunConfig::default();
    for seed in 0..20 {
        let (inst, _) = sample_instance(&spec(64, 0.8, seed)).unwrap();
        let lambda = 0.2 * lambda_max(&inst);
        let (sol, rep) = solve_lasso(&inst, lambda, None, &cfg);
        assert!(rep.converged, "seed {seed}");
        let y_norm = inst.y().iter().map(|v| v * v).sum::<f64>().sqrt();
        let tol = cfg.solver_tol * (1.0 + y_norm);
        let kkt = kkt_residual(&inst, &sol.x1, lambda);
        assert!(kkt <= tol, "seed {seed}: kkt {kkt} > {tol}");
    }
}

#[test]
fn warm_path_solutions_match_cold_solves() {
    let (inst, _) = sample_instance(&spec(50, 0.6, 5)).unwrap();
    let lmax = lambda_max(&inst);
    let grid: Vec<f64> = (0..10).map(|i| lmax * 0.7f64.powi(i)).collect();
    let (cfg, _) = RunConfig::default().with_grid(grid.clone()).unwrap();
    let path = solve_path(&inst, &cfg).unwrap();
    for ((sol, rep), &lambda) in path.iter().zip(&grid) {
        assert!(rep.converged);
        let (cold, _) = solve_lasso(&inst, lambda, None, &cfg);
        let diff = (&sol.x1 - &cold.x1)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(diff < 1e-7, "lambda {lambda}: warm/cold diff {diff}");
    }
}
