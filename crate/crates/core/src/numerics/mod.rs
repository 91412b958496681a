//! Special functions and quadrature shared by the analytic engines.
//!
//! - Gaussian tail `Q`, scaled complementary error function `erfcx`
//! - `rho(tau, alpha)`, the interference exponent of the coverage theorems
//! - `zeta_alpha`, the instantaneous-power cell-selection constant
//! - the Gaussian-exponential integral used by the alpha = 4 noise formula
//! - adaptive Gauss-Kronrod integration (see [`quadrature`])
//!
//! Closed forms are used whenever `alpha` is exactly 4; quadrature otherwise.
//! Default tolerances make analytic results at least two orders of magnitude
//! more accurate than the Monte Carlo noise they are validated against.

mod quadrature;

pub use quadrature::{integrate, Domain, Quadrature, QuadratureError, QuadratureSpec};

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Standard Gaussian tail probability `Q(x) = P[N(0,1) > x]`.
pub fn q_function(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid("x", "q_function requires finite input"));
    }
    Ok(0.5 * libm::erfc(x / std::f64::consts::SQRT_2))
}

/// Scaled complementary error function `erfcx(x) = exp(x^2) erfc(x)`.
///
/// Direct product for x < 5, Lentz continued fraction beyond, so the value
/// stays accurate where `exp(x^2)` alone would overflow.
pub fn erfcx(x: f64) -> f64 {
    if x < 5.0 {
        (x * x).exp() * libm::erfc(x)
    } else {
        // sqrt(pi) exp(x^2) erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))));
        // modified Lentz on F = x + (1/2)/(x + 1/(x + ...)).
        let tiny = 1e-300;
        let mut f = x;
        let mut c = f;
        let mut d = 0.0;
        for n in 1..200 {
            let a_n = n as f64 / 2.0;
            d = x + a_n * d;
            if d == 0.0 {
                d = tiny;
            }
            c = x + a_n / c;
            if c == 0.0 {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        1.0 / (PI.sqrt() * f)
    }
}

fn require_alpha_gt_2(alpha: f64) -> Result<()> {
    if alpha <= 2.0 || !alpha.is_finite() {
        return Err(Error::invalid(
            "alpha",
            format!("path-loss exponent must satisfy alpha > 2 (the interference integral diverges otherwise), got {alpha}"),
        ));
    }
    Ok(())
}

/// `K(c) = int_c^inf du / (1 + u^(alpha/2))`, the tail of the interference
/// kernel. Building block for `rho`, the downlink Laplace transform and the
/// uplink link-distance integral.
///
/// Evaluated as `zeta(alpha)/pi - int_0^c` (finite-interval quadrature), with
/// an asymptotic series for large `c` where the subtraction would cancel.
/// `alpha = 4` uses `arctan(1/c)` exactly.
pub(crate) fn interference_tail(c: f64, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
    require_alpha_gt_2(alpha)?;
    if c < 0.0 || c.is_nan() {
        return Err(Error::invalid(
            "c",
            format!("tail start must be >= 0, got {c}"),
        ));
    }
    if alpha == 4.0 {
        return Ok(if c == 0.0 { PI / 2.0 } else { (1.0 / c).atan() });
    }
    interference_tail_general(c, alpha, spec)
}

/// General-`alpha` path of [`interference_tail`], kept separate so the
/// `alpha = 4` closed form can be cross-checked against it.
pub(crate) fn interference_tail_general(c: f64, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
    let half = alpha / 2.0;
    if c.powf(half) > 1e4 {
        // Tail series: sum_k (-1)^(k+1) c^(1 - k alpha/2) / (k alpha/2 - 1).
        let mut sum = 0.0;
        let ratio = c.powf(-half);
        let mut term_pow = c * ratio; // c^(1 - alpha/2)
        let mut sign = 1.0;
        for k in 1..=8 {
            sum += sign * term_pow / (k as f64 * half - 1.0);
            term_pow *= ratio;
            sign = -sign;
        }
        return Ok(sum);
    }
    let full = zeta_alpha(alpha)? / PI;
    if c == 0.0 {
        return Ok(full);
    }
    let head = integrate(
        |u| 1.0 / (1.0 + u.powf(half)),
        Domain::Finite { a: 0.0, b: c },
        spec,
    )
    .map_err(|e| Error::quadrature("interference tail integral", e))?;
    Ok(full - head.value)
}

/// `rho(tau, alpha) = tau^(2/alpha) int_{tau^(-2/alpha)}^inf du/(1+u^(alpha/2))`.
///
/// Nonnegative, nondecreasing in `tau`; `rho(tau, 4) = sqrt(tau) arctan
/// sqrt(tau)` is used as a fast path when `alpha` is exactly 4.
pub fn rho(tau: f64, alpha: f64) -> Result<f64> {
    require_alpha_gt_2(alpha)?;
    if tau < 0.0 || !tau.is_finite() {
        return Err(Error::invalid(
            "tau",
            format!("SIR threshold must be finite and >= 0, got {tau}"),
        ));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    if alpha == 4.0 {
        let s = tau.sqrt();
        return Ok(s * s.atan());
    }
    let spec = QuadratureSpec::default();
    let c = tau.powf(-2.0 / alpha);
    Ok(tau.powf(2.0 / alpha) * interference_tail(c, alpha, &spec)?)
}

#[cfg(test)]
pub(crate) fn rho_by_quadrature(tau: f64, alpha: f64) -> Result<f64> {
    let spec = QuadratureSpec::default();
    let c = tau.powf(-2.0 / alpha);
    Ok(tau.powf(2.0 / alpha) * interference_tail_general(c, alpha, &spec)?)
}

/// `zeta(alpha) = (2 pi^2 / alpha) csc(2 pi / alpha)`, equal to
/// `2 pi int_0^inf u/(1+u^alpha) du`.
pub fn zeta_alpha(alpha: f64) -> Result<f64> {
    require_alpha_gt_2(alpha)?;
    let arg = 2.0 * PI / alpha;
    Ok(2.0 * PI * PI / (alpha * arg.sin()))
}

/// `int_0^inf exp(-a x - b x^2) dx = 1/2 sqrt(pi/b) erfcx(a / (2 sqrt(b)))`.
///
/// The `erfcx` form avoids the overflow of the textbook `exp(a^2/4b) Q(...)`
/// product when `a^2/4b` is large.
pub fn gauss_exp_integral(a: f64, b: f64) -> Result<f64> {
    if a < 0.0 || !a.is_finite() {
        return Err(Error::invalid(
            "a",
            format!("must be finite and >= 0, got {a}"),
        ));
    }
    if b <= 0.0 || !b.is_finite() {
        return Err(Error::invalid(
            "b",
            format!("must be finite and > 0, got {b}"),
        ));
    }
    Ok(0.5 * (PI / b).sqrt() * erfcx(a / (2.0 * b.sqrt())))
}

/// `int_0^inf exp(-lin w - pow_coef w^exponent) dw`, the normalized coverage
/// integral shared by the downlink and HetNet theorems.
pub(crate) fn exp_linear_power_integral(
    lin: f64,
    pow_coef: f64,
    exponent: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    debug_assert!(lin > 0.0 && pow_coef >= 0.0 && exponent > 1.0);
    let q = integrate(
        move |w| {
            let noise = if pow_coef == 0.0 {
                0.0
            } else {
                pow_coef * w.powf(exponent)
            };
            (-lin * w - noise).exp()
        },
        Domain::SemiInfinite { a: 0.0 },
        spec,
    )
    .map_err(|e| Error::quadrature("coverage integral", e))?;
    Ok(q.value)
}
