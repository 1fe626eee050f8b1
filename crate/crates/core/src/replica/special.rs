//! Gaussian tail moments and the two derived special functions entering the
//! equations of state.

use crate::error::{Error, Result};

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Upper tail moment `E_k(theta) = int_theta^inf z^k Dz` for k in {0, 1, 2},
/// with `Dz` the standard normal weight.
pub fn gauss_tail_moment(k: usize, theta: f64) -> f64 {
    assert!(k <= 2, "tail moments are defined for k in {{0, 1, 2}}");
    if theta == f64::INFINITY {
        return 0.0;
    }
    match k {
        0 => 0.5 * libm::erfc(theta / std::f64::consts::SQRT_2),
        1 => normal_pdf(theta),
        _ => theta_pdf(theta) + gauss_tail_moment(0, theta),
    }
}

/// `theta * pdf(theta)` with the infinite-theta limits handled (the density
/// underflows to zero first for any finite theta).
fn theta_pdf(theta: f64) -> f64 {
    if theta.is_infinite() {
        0.0
    } else {
        theta * normal_pdf(theta)
    }
}

/// `F(theta) = lambda^2 { E_0 - pdf(theta)/theta + E_0/theta^2 }`, equal to
/// `(lambda^2/theta^2) int_theta^inf (z - theta)^2 Dz`.
pub fn f_func(theta: f64, lambda: f64) -> Result<f64> {
    if theta.is_nan() || theta <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "F is defined for theta > 0, got {theta}"
        )));
    }
    Ok(f_with_scale(theta, lambda, lambda * lambda / (theta * theta)))
}

/// `F` with the ratio `s = lambda^2 / theta^2` supplied by the caller, who
/// knows it in closed form; this keeps the `theta -> 0` region finite.
pub(crate) fn f_with_scale(theta: f64, lambda: f64, s: f64) -> f64 {
    let e0 = gauss_tail_moment(0, theta);
    lambda * lambda * e0 + s * (e0 - theta_pdf(theta))
}

/// `G(theta) = (theta^3 / lambda^2) pdf(theta)`.
pub fn g_func(theta: f64, lambda: f64) -> f64 {
    g_with_scale(theta, lambda * lambda / (theta * theta))
}

/// `G` written as `theta * pdf(theta) / s` with `s = lambda^2 / theta^2`.
pub(crate) fn g_with_scale(theta: f64, s: f64) -> f64 {
    theta_pdf(theta) / s
}
