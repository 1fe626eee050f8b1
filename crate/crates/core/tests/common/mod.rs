//! Test-only oracles, kept independent of the implementation paths they
//! check: an accelerated proximal-gradient LASSO solver and an adaptive
//! Simpson integrator for the Gaussian tail functions.

#![allow(dead_code)]

use ndarray::{Array1, Array2};

/// Accelerated proximal gradient (FISTA) for
/// `min 0.5 ||y - A x||^2 + lambda ||x||_1`, run to a fixed KKT target.
/// Shares no code with the coordinate-descent solver under test.
pub fn fista_lasso(
    a: &Array2<f64>,
    y: &Array1<f64>,
    lambda: f64,
    kkt_target: f64,
    max_iter: usize,
) -> Array1<f64> {
    let n = a.ncols();
    let lip = spectral_norm_sq(a) * 1.01 + 1e-12;
    let mut x = Array1::<f64>::zeros(n);
    let mut z = x.clone();
    let mut t = 1.0f64;
    for it in 0..max_iter {
        let grad = a.t().dot(&(a.dot(&z) - y));
        let mut x_next = Array1::<f64>::zeros(n);
        for i in 0..n {
            let v = z[i] - grad[i] / lip;
            let thr = lambda / lip;
            x_next[i] = if v > thr {
                v - thr
            } else if v < -thr {
                v + thr
            } else {
                0.0
            };
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = &x_next + &((&x_next - &x) * ((t - 1.0) / t_next));
        x = x_next;
        t = t_next;
        if it % 100 == 99 && lasso_kkt(a, y, &x, lambda) < kkt_target {
            break;
        }
    }
    x
}

fn lasso_kkt(a: &Array2<f64>, y: &Array1<f64>, x: &Array1<f64>, lambda: f64) -> f64 {
    let g = a.t().dot(&(y - &a.dot(x)));
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let v = if x[i] != 0.0 {
            (g[i] - lambda * x[i].signum()).abs()
        } else {
            (g[i].abs() - lambda).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

fn spectral_norm_sq(a: &Array2<f64>) -> f64 {
    // power iteration on A^T A
    let n = a.ncols();
    let mut v = Array1::from_elem(n, 1.0 / (n as f64).sqrt());
    let mut lam = 0.0;
    for _ in 0..200 {
        let w = a.t().dot(&a.dot(&v));
        lam = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if lam == 0.0 {
            return 0.0;
        }
        v = w / lam;
    }
    lam
}

/// Adaptive Simpson quadrature over unit-width panels, so a long decaying
/// tail cannot hide from the initial probe points.
pub fn integrate<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, eps: f64) -> f64 {
    let panels = ((b - a).ceil() as usize).max(1);
    let width = (b - a) / panels as f64;
    let panel_eps = eps / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let hi = lo + width;
        let m = 0.5 * (lo + hi);
        total += adaptive(f, lo, hi, f(lo), f(m), f(hi), panel_eps, 60);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64 + Copy>(
    f: F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    eps: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, 0.5 * eps, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, 0.5 * eps, depth - 1)
    }
}

fn normal_weight(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Quadrature value of `E_k(theta) = int_theta^inf z^k Dz`.
pub fn tail_moment_quadrature(k: usize, theta: f64) -> f64 {
    let cut = theta + 45.0;
    integrate(|z| z.powi(k as i32) * normal_weight(z), theta, cut, 1e-14)
}

/// Quadrature value of `(lambda^2/theta^2) int_theta^inf (z-theta)^2 Dz`.
pub fn f_quadrature(theta: f64, lambda: f64) -> f64 {
    let cut = theta + 45.0;
    let integral = integrate(
        |z| (z - theta) * (z - theta) * normal_weight(z),
        theta,
        cut,
        1e-14,
    );
    lambda * lambda / (theta * theta) * integral
}

/// `G` evaluated directly from its definition.
pub fn g_reference(theta: f64, lambda: f64) -> f64 {
    theta.powi(3) / (lambda * lambda) * normal_weight(theta)
}
