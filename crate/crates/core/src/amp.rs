//! Damped fixed-point iteration of the message-passing equations for both
//! estimators. Any fixed point of the type-1 system satisfies the LASSO
//! optimality conditions exactly (the scalar curvature only shapes the
//! dynamics), so solutions returned as converged agree with the coordinate
//! descent solver up to tolerance.
//!
//! The scalar closure replaces the per-coordinate curvatures by
//! `Gamma = alpha - rho_t` (active fraction of the current iterate), the
//! diagonal weak-correlation form for the i.i.d. ensemble. The iteration is
//! damped; when the fixed-point residual stops shrinking the damping is
//! halved, which keeps the small `alpha - rho` regime from oscillating.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::lasso::{kkt_residual, soft_threshold};
use crate::model::{LassoSolution, ProblemInstance, RunConfig};
use crate::lasso::SolverReport;

/// Iteration state: estimate, cavity residuals, effective fields, and the
/// scalar curvature.
#[derive(Debug, Clone)]
pub struct AmpState {
    pub x: Array1<f64>,
    /// Cavity residuals `a = y - A x`.
    pub a: Array1<f64>,
    /// Effective fields `h = A^T a + Gamma x`.
    pub h: Array1<f64>,
    pub gamma: f64,
    pub iter: usize,
}

const GAMMA_FLOOR: f64 = 1e-8;
/// Iterations between stagnation checks that halve the damping.
const STALL_WINDOW: usize = 100;
const MIN_DAMPING: f64 = 1e-3;

fn divergence_bound(inst: &ProblemInstance) -> f64 {
    let y_inf = inst.y().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    1e6 * (1.0 + y_inf)
}

/// Solves the type-1 (penalized) fixed-point system at one penalty value.
///
/// A cold start directly at a small penalty can blow up before the support
/// settles (the initial fields activate far more than `alpha * N`
/// coordinates and the curvature collapses), so the target is approached by
/// penalty continuation from `||A^T y||_inf`, where the zero vector is the
/// exact fixed point. Divergence past the guard bound returns the last
/// finite state with `converged = false`; it never panics.
pub fn amp_solve_x1(
    inst: &ProblemInstance,
    lambda: f64,
    cfg: &RunConfig,
) -> (LassoSolution, AmpState, SolverReport) {
    let n = inst.n();
    let a_mat = inst.a();
    let alpha = inst.alpha();
    let bound = divergence_bound(inst);

    let lambda_top = a_mat
        .t()
        .dot(inst.y())
        .iter()
        .fold(0.0f64, |m, g| m.max(g.abs()));
    let mut stages: Vec<f64> = Vec::new();
    let mut l = lambda_top * 0.5;
    while l > lambda {
        stages.push(l);
        l *= 0.5;
    }
    stages.push(lambda);
    // loose targets for the continuation stages, full tolerance at the end
    let stage_tol = cfg.solver_tol.max(1e-6);
    let stage_budget = (cfg.max_iter / (2 * stages.len())).max(1);

    let mut x: Array1<f64> = Array1::zeros(n);
    let mut gamma = alpha.max(GAMMA_FLOOR);
    let mut resid = f64::INFINITY;
    let mut converged = false;
    let mut iters = 0usize;
    let mut hopeless = false;

    for (si, &stage_lambda) in stages.iter().enumerate() {
        let last_stage = si + 1 == stages.len();
        let tol = if last_stage { cfg.solver_tol } else { stage_tol };
        let budget = if last_stage {
            cfg.max_iter.saturating_sub(iters).max(1)
        } else {
            stage_budget
        };
        // a stage that overshoots restarts from its entry state with less
        // aggressive damping
        let entry = (x.clone(), gamma);
        let mut eta = cfg.damping;
        'retry: loop {
            converged = false;
            let mut stall_ref = f64::INFINITY;
            let mut diverged = false;
            for t in 0..budget {
                iters += 1;
                let a = inst.y() - &a_mat.dot(&x);
                let h = a_mat.t().dot(&a) + &(gamma * &x);
                let mut cand = Array1::zeros(n);
                let mut active = 0usize;
                for i in 0..n {
                    let v = soft_threshold(h[i], stage_lambda, gamma);
                    if v != 0.0 {
                        active += 1;
                    }
                    cand[i] = v;
                }
                let rho_t = active as f64 / n as f64;
                let gamma_cand = (alpha - rho_t).max(GAMMA_FLOOR);

                resid = x
                    .iter()
                    .zip(cand.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);

                if resid <= tol {
                    // adopt the map output: it carries exact zeros off the
                    // support, while the damped iterate only decays there
                    x = cand;
                    gamma = gamma_cand;
                    converged = true;
                    break;
                }
                let next: Array1<f64> = (1.0 - eta) * &x + eta * &cand;
                if next.iter().any(|v| !v.is_finite()) {
                    diverged = true;
                    break;
                }
                x = next;
                gamma = (1.0 - eta) * gamma + eta * gamma_cand;

                if x.iter().fold(0.0f64, |mx, v| mx.max(v.abs())) > bound {
                    diverged = true;
                    break;
                }
                if t % STALL_WINDOW == STALL_WINDOW - 1 {
                    if resid >= stall_ref && eta > MIN_DAMPING {
                        eta *= 0.5;
                    }
                    stall_ref = resid;
                }
            }
            if diverged && eta > MIN_DAMPING {
                x = entry.0.clone();
                gamma = entry.1;
                eta *= 0.5;
                continue 'retry;
            }
            if diverged {
                hopeless = true;
                converged = false;
            }
            break 'retry;
        }
        if hopeless {
            break;
        }
    }

    let kkt = kkt_residual(inst, &x, lambda);
    let sol = LassoSolution::from_estimate(lambda, x.clone(), cfg.active_threshold);
    // report internally consistent quantities for the final iterate
    let a = inst.y() - &a_mat.dot(&x);
    let h = a_mat.t().dot(&a) + &(gamma * &x);
    let state = AmpState {
        x,
        a,
        h,
        gamma,
        iter: iters,
    };
    (
        sol,
        state,
        SolverReport {
            iterations: iters,
            kkt_residual: kkt,
            converged: converged && resid.is_finite(),
        },
    )
}

/// Solves the type-2 system: the same iteration with the support frozen to
/// the type-1 solution and no shrinkage on it. Its fixed point is the
/// least-squares refit on that support, which is cross-checked by tests
/// against the direct normal-equation solve.
pub fn amp_solve_x2(
    inst: &ProblemInstance,
    base: &LassoSolution,
    cfg: &RunConfig,
) -> Result<(Array1<f64>, SolverReport)> {
    let n = inst.n();
    if base.x1.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "base solution has {} coordinates, instance has {n}",
            base.x1.len()
        )));
    }
    let a_mat = inst.a();
    let alpha = inst.alpha();
    let bound = divergence_bound(inst);
    let mut support = vec![false; n];
    for &i in &base.active_set {
        support[i] = true;
    }
    if base.active_set.is_empty() {
        return Ok((
            Array1::zeros(n),
            SolverReport {
                iterations: 0,
                kkt_residual: 0.0,
                converged: true,
            },
        ));
    }

    // The fixed point is the least-squares solution on the support for any
    // positive curvature, so a degenerate ensemble value (alpha - rho -> 0)
    // may be floored at the column-norm scale without moving it.
    let col_floor = 0.5
        * base
            .active_set
            .iter()
            .map(|&i| a_mat.column(i).iter().map(|v| v * v).sum::<f64>())
            .fold(0.0f64, f64::max);
    let gamma = (alpha - base.rho).max(col_floor.max(GAMMA_FLOOR));
    let mut x: Array1<f64> = Array1::zeros(n);
    for &i in &base.active_set {
        x[i] = base.x1[i];
    }
    let mut eta = cfg.damping;
    let mut stall_ref = f64::INFINITY;
    let mut converged = false;
    let mut iters = 0;

    for t in 0..cfg.max_iter {
        iters = t + 1;
        let a = inst.y() - &a_mat.dot(&x);
        let h = a_mat.t().dot(&a) + &(gamma * &x);
        let mut cand = Array1::zeros(n);
        for i in 0..n {
            if support[i] {
                cand[i] = h[i] / gamma;
            }
        }
        let resid = x
            .iter()
            .zip(cand.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let next: Array1<f64> = (1.0 - eta) * &x + eta * &cand;
        if next.iter().any(|v| !v.is_finite()) {
            break;
        }
        x = next;
        if x.iter().fold(0.0f64, |mx, v| mx.max(v.abs())) > bound {
            break;
        }
        if resid <= cfg.solver_tol {
            converged = true;
            break;
        }
        if t % STALL_WINDOW == STALL_WINDOW - 1 {
            if resid >= stall_ref && eta > MIN_DAMPING {
                eta *= 0.5;
            }
            stall_ref = resid;
        }
    }

    // normal-equation residual on the support doubles as the certificate
    let r = inst.y() - &a_mat.dot(&x);
    let g = a_mat.t().dot(&r);
    let kkt = base
        .active_set
        .iter()
        .map(|&i| g[i].abs())
        .fold(0.0f64, f64::max);
    Ok((
        x,
        SolverReport {
            iterations: iters,
            kkt_residual: kkt,
            converged,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{sample_instance, EnsembleSpec};
    use crate::lasso::{debias, lambda_max, solve_lasso};
    use ndarray::array;

    fn cfg() -> RunConfig {
        RunConfig::default()
    }

    #[test]
    fn above_lambda_max_fixed_point_is_zero() {
        let spec = EnsembleSpec {
            n: 40,
            alpha: 0.5,
            rho_hat: 0.2,
            sigma_x2: 1.0,
            sigma_xi2: 0.01,
            seed: 23,
        };
        let (inst, _) = sample_instance(&spec).unwrap();
        let lambda = lambda_max(&inst) * 1.1;
        let (sol, state, rep) = amp_solve_x1(&inst, lambda, &cfg());
        assert!(rep.converged);
        assert!(sol.x1.iter().all(|v| *v == 0.0));
        let a_diff = (&state.a - inst.y())
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(a_diff < 1e-12);
    }

    #[test]
    fn matches_coordinate_descent_mid_path() {
        let spec = EnsembleSpec {
            n: 400,
            alpha: 0.5,
            rho_hat: 0.1,
            sigma_x2: 1.0,
            sigma_xi2: 0.001,
            seed: 7,
        };
        let (inst, _) = sample_instance(&spec).unwrap();
        let lambda = 0.1 * lambda_max(&inst);
        let (amp_sol, _, amp_rep) = amp_solve_x1(&inst, lambda, &cfg());
        assert!(amp_rep.converged, "AMP failed to converge");
        let (cd_sol, cd_rep) = solve_lasso(&inst, lambda, None, &cfg());
        assert!(cd_rep.converged);
        let diff = (&amp_sol.x1 - &cd_sol.x1)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(diff < 1e-4, "linf difference {diff}");
    }

    #[test]
    fn fixed_point_gamma_approaches_alpha_minus_rho() {
        let spec = EnsembleSpec {
            n: 600,
            alpha: 0.5,
            rho_hat: 0.1,
            sigma_x2: 1.0,
            sigma_xi2: 0.001,
            seed: 40,
        };
        let (inst, _) = sample_instance(&spec).unwrap();
        let lambda = 0.2 * lambda_max(&inst);
        let (sol, state, rep) = amp_solve_x1(&inst, lambda, &cfg());
        assert!(rep.converged);
        assert!((state.gamma - (inst.alpha() - sol.rho)).abs() < 1e-2);
    }

    #[test]
    fn kkt_correspondence_at_fixed_point() {
        let spec = EnsembleSpec {
            n: 200,
            alpha: 0.6,
            rho_hat: 0.15,
            sigma_x2: 1.0,
            sigma_xi2: 0.01,
            seed: 3,
        };
        let (inst, _) = sample_instance(&spec).unwrap();
        let lambda = 0.15 * lambda_max(&inst);
        let (sol, state, rep) = amp_solve_x1(&inst, lambda, &cfg());
        assert!(rep.converged);
        let tol = 1e-6;
        for i in 0..inst.n() {
            if sol.x1[i] == 0.0 {
                assert!(state.h[i].abs() <= lambda + tol);
            } else {
                let slack = state.h[i] - state.gamma * sol.x1[i] - lambda * sol.x1[i].signum();
                assert!(slack.abs() <= tol, "coordinate {i}: {slack}");
            }
        }
        assert!(rep.kkt_residual <= 1e-6);
    }

    #[test]
    fn type2_empty_support_and_scalar_case() {
        let inst = ProblemInstance::new(array![[1.0]], array![2.0]).unwrap();
        let base = LassoSolution::from_estimate(0.5, array![1.5], 1e-6);
        let (x2, rep) = amp_solve_x2(&inst, &base, &cfg()).unwrap();
        assert!(rep.converged);
        assert!((x2[0] - 2.0).abs() < 1e-8);

        let empty = LassoSolution::from_estimate(0.5, array![0.0], 1e-6);
        let (x2, rep) = amp_solve_x2(&inst, &empty, &cfg()).unwrap();
        assert!(rep.converged);
        assert_eq!(x2[0], 0.0);
    }

    #[test]
    fn type2_matches_debias() {
        let spec = EnsembleSpec {
            n: 200,
            alpha: 0.5,
            rho_hat: 0.1,
            sigma_x2: 1.0,
            sigma_xi2: 0.001,
            seed: 11,
        };
        let (inst, _) = sample_instance(&spec).unwrap();
        let lambda = 0.15 * lambda_max(&inst);
        let (sol, rep) = solve_lasso(&inst, lambda, None, &cfg());
        assert!(rep.converged);
        let deb = debias(&inst, &sol).unwrap();
        let (x2, rep2) = amp_solve_x2(&inst, &sol, &cfg()).unwrap();
        assert!(rep2.converged);
        let diff = (&x2 - deb.x2.as_ref().unwrap())
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(diff < 1e-4, "linf difference {diff}");
    }
}
