//! Analytic downlink coverage for a single-tier Poisson cellular network:
//! interference moments, the Rayleigh-faded interference Laplace transform,
//! the general SINR coverage integral with its two closed-form special cases,
//! and the shadowing displacement-equivalence density.
//!
//! Thresholds are linear throughout; dB conversion belongs to the caller.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, QuadratureSpec};

/// Single-tier downlink model parameters.
///
/// `power` is the transmit power with the reference path loss at unit
/// distance absorbed into it, so `snr = power / sigma2` is the mean received
/// SNR at distance 1. Units are self-consistent: `lambda` must be expressed
/// per squared length in the same length unit that makes the unit-distance
/// reference hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DownlinkParams {
    /// Base-station density (points per unit area).
    pub lambda: f64,
    /// Transmit power (linear).
    pub power: f64,
    /// Path-loss exponent, must exceed 2.
    pub alpha: f64,
    /// Noise power (linear); 0 selects the interference-limited regime.
    pub sigma2: f64,
}

impl DownlinkParams {
    pub fn new(lambda: f64, power: f64, alpha: f64, sigma2: f64) -> Result<Self> {
        let p = DownlinkParams {
            lambda,
            power,
            alpha,
            sigma2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda <= 0.0 || !self.lambda.is_finite() {
            return Err(Error::invalid(
                "lambda",
                format!("must be > 0, got {}", self.lambda),
            ));
        }
        if self.power <= 0.0 || !self.power.is_finite() {
            return Err(Error::invalid(
                "power",
                format!("must be > 0, got {}", self.power),
            ));
        }
        if self.alpha <= 2.0 || !self.alpha.is_finite() {
            return Err(Error::invalid(
                "alpha",
                format!("must be > 2, got {}", self.alpha),
            ));
        }
        if self.sigma2 < 0.0 || !self.sigma2.is_finite() {
            return Err(Error::invalid(
                "sigma2",
                format!("must be >= 0, got {}", self.sigma2),
            ));
        }
        Ok(())
    }

    /// Mean received SNR at unit distance; infinite when `sigma2 = 0`.
    pub fn snr(&self) -> f64 {
        if self.sigma2 == 0.0 {
            f64::INFINITY
        } else {
            self.power / self.sigma2
        }
    }
}

/// Mean interference at the origin from a PPP restricted to the annulus
/// `a <= ||x|| < b` (Campbell's theorem):
/// `2 pi lambda p / (alpha - 2) (a^(2-alpha) - b^(2-alpha))`.
///
/// `b` may be infinite, which requires `alpha > 2` and `a > 0`.
pub fn mean_interference_annulus(
    lambda: f64,
    power: f64,
    alpha: f64,
    a: f64,
    b: f64,
) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) || !(power.is_finite() && power > 0.0) {
        return Err(Error::invalid("lambda/power", "must be finite and > 0"));
    }
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::invalid("alpha", format!("must be > 0, got {alpha}")));
    }
    if a < 0.0 || !a.is_finite() {
        return Err(Error::invalid(
            "a",
            format!("must be finite and >= 0, got {a}"),
        ));
    }
    if b < a || b.is_nan() {
        return Err(Error::invalid("b", format!("must satisfy b >= a, got {b}")));
    }
    if b == f64::INFINITY {
        if alpha <= 2.0 {
            return Err(Error::invalid(
                "alpha",
                format!("mean interference over an unbounded annulus diverges for alpha <= 2 (got {alpha})"),
            ));
        }
        if a == 0.0 {
            return Err(Error::invalid(
                "a",
                "mean interference with a = 0 and b = inf diverges at the origin",
            ));
        }
    }
    if a == 0.0 && alpha >= 2.0 {
        return Err(Error::invalid(
            "a",
            format!("mean interference with a = 0 diverges for alpha >= 2 (got {alpha})"),
        ));
    }
    if b == a {
        return Ok(0.0);
    }
    let c = 2.0 * PI * lambda * power;
    if alpha == 2.0 {
        return Ok(c * (b / a).ln());
    }
    let pow = |x: f64| {
        if x == f64::INFINITY {
            // x^(2 - alpha): alpha > 2 guaranteed above for infinite b.
            0.0
        } else if x == 0.0 {
            // a = 0 only reaches here with alpha < 2.
            0.0
        } else {
            x.powf(2.0 - alpha)
        }
    };
    Ok(c / (alpha - 2.0) * (pow(a) - pow(b)))
}

/// Laplace transform of the Rayleigh-faded shot-noise interference from a
/// PPP outside an exclusion disk of radius `r_excl`:
/// `exp(-2 pi lambda int_{r_excl}^inf x / (1 + (s p)^-1 x^alpha) dx)`.
///
/// For `alpha = 4` and `r_excl = 0` the exponent reduces to
/// `pi^2 lambda sqrt(s p) / 2` in closed form.
pub fn laplace_interference(
    s: f64,
    lambda: f64,
    power: f64,
    alpha: f64,
    r_excl: f64,
) -> Result<f64> {
    if s < 0.0 || !s.is_finite() {
        return Err(Error::invalid(
            "s",
            format!("must be finite and >= 0, got {s}"),
        ));
    }
    if !(lambda.is_finite() && lambda > 0.0) || !(power.is_finite() && power > 0.0) {
        return Err(Error::invalid("lambda/power", "must be finite and > 0"));
    }
    if alpha <= 2.0 || !alpha.is_finite() {
        return Err(Error::invalid("alpha", format!("must be > 2, got {alpha}")));
    }
    if r_excl < 0.0 || !r_excl.is_finite() {
        return Err(Error::invalid(
            "r_excl",
            format!("must be >= 0, got {r_excl}"),
        ));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    // Substituting y = x (s p)^(-1/alpha) reduces the exponent to
    // pi lambda (s p)^(2/alpha) K(r_excl^2 (s p)^(-2/alpha)) with
    // K(c) = int_c^inf du/(1 + u^(alpha/2)); alpha = 4, r_excl = 0 gives
    // K(0) = pi/2.
    let sp = s * power;
    let c = r_excl * r_excl * sp.powf(-2.0 / alpha);
    let tail = numerics::interference_tail(c, alpha, &QuadratureSpec::default())?;
    Ok((-PI * lambda * sp.powf(2.0 / alpha) * tail).exp())
}

fn validate_tau(tau: f64) -> Result<()> {
    if tau <= 0.0 || !tau.is_finite() {
        return Err(Error::invalid(
            "tau",
            format!("must be finite and > 0, got {tau}"),
        ));
    }
    Ok(())
}

/// Coverage probability of the typical user (general SINR case):
/// `pi lambda int_0^inf exp(-pi lambda v (1 + rho) - tau SNR^-1 v^(alpha/2)) dv`,
/// evaluated by quadrature after normalizing out the density.
pub fn coverage_general(tau: f64, params: &DownlinkParams) -> Result<f64> {
    validate_tau(tau)?;
    params.validate()?;
    let rho = numerics::rho(tau, params.alpha)?;
    // w = pi lambda v turns the prefactor into 1 and scales the noise term by
    // (pi lambda)^(-alpha/2), keeping the integrand O(1) for any density.
    let noise_coef =
        tau * params.sigma2 / params.power * (PI * params.lambda).powf(-params.alpha / 2.0);
    numerics::exp_linear_power_integral(
        1.0 + rho,
        noise_coef,
        params.alpha / 2.0,
        &QuadratureSpec::default(),
    )
}

/// Coverage with noise for `alpha = 4`, via the Gaussian-exponential integral:
/// `pi lambda G(pi lambda kappa(tau), tau/SNR)` with
/// `kappa(tau) = 1 + sqrt(tau) arctan sqrt(tau)`.
///
/// Computed through `erfcx`, which stays finite where the textbook
/// `exp(...) Q(...)` product overflows.
pub fn coverage_alpha4_snr(tau: f64, lambda: f64, snr: f64) -> Result<f64> {
    validate_tau(tau)?;
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(Error::invalid(
            "lambda",
            format!("must be > 0, got {lambda}"),
        ));
    }
    if snr <= 0.0 || !snr.is_finite() {
        return Err(Error::invalid(
            "snr",
            format!("must be finite and > 0 (use coverage_interflimited for SNR = inf), got {snr}"),
        ));
    }
    let kappa = 1.0 + tau.sqrt() * tau.sqrt().atan();
    let a = PI * lambda * kappa;
    let b = tau / snr;
    Ok(PI * lambda * numerics::gauss_exp_integral(a, b)?)
}

/// Interference-limited coverage `1 / (1 + rho(tau, alpha))`.
///
/// Takes no density: the SIR distribution is invariant to the base-station
/// density by construction.
pub fn coverage_interflimited(tau: f64, alpha: f64) -> Result<f64> {
    validate_tau(tau)?;
    Ok(1.0 / (1.0 + numerics::rho(tau, alpha)?))
}

/// Shadowing specification for the displacement-equivalence transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ShadowingSpec {
    /// Lognormal shadowing with unit median and the given dB spread.
    LogNormalDb { sigma_db: f64 },
    /// Any distribution, specified directly by its moment `E[chi^(2/alpha)]`.
    FractionalMoment { moment: f64 },
}

/// `E[chi^(2/alpha)]` for unit-median lognormal shadowing with dB spread
/// `sigma_db`.
pub(crate) fn lognormal_fractional_moment(sigma_db: f64, alpha: f64) -> f64 {
    let t = 2.0 / alpha * sigma_db * std::f64::consts::LN_10 / 10.0;
    (0.5 * t * t).exp()
}

/// Equivalent density of the shadowed network: `lambda_D = lambda E[chi^(2/alpha)]`.
///
/// Coverage of the shadowed network equals no-shadowing coverage evaluated at
/// this density (displacement theorem).
pub fn shadowing_equivalent_density(
    lambda: f64,
    alpha: f64,
    shadowing: &ShadowingSpec,
) -> Result<f64> {
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(Error::invalid(
            "lambda",
            format!("must be > 0, got {lambda}"),
        ));
    }
    if alpha <= 2.0 || !alpha.is_finite() {
        return Err(Error::invalid("alpha", format!("must be > 2, got {alpha}")));
    }
    let moment = match *shadowing {
        ShadowingSpec::LogNormalDb { sigma_db } => {
            if !sigma_db.is_finite() || sigma_db < 0.0 {
                return Err(Error::invalid(
                    "sigma_db",
                    format!("must be finite and >= 0, got {sigma_db}"),
                ));
            }
            lognormal_fractional_moment(sigma_db, alpha)
        }
        ShadowingSpec::FractionalMoment { moment } => moment,
    };
    if !moment.is_finite() || moment <= 0.0 {
        return Err(Error::invalid(
            "moment",
            format!("fractional moment E[chi^(2/alpha)] must be finite and > 0, got {moment}"),
        ));
    }
    Ok(lambda * moment)
}
