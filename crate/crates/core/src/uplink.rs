//! Analytic uplink coverage with distance-proportional fractional power
//! control: the truncated link-distance law, the interferer-field intensity,
//! the nested-quadrature interference Laplace transform, the coverage
//! theorem built on it, and the full-channel-inversion closed form.
//!
//! The analytic model adopts the standard approximations (active users form a
//! PPP, link distances are i.i.d. truncated Rayleigh). The simulator in
//! [`crate::sim`] deliberately does not, so the gap between the two measures
//! the quality of those approximations.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, Domain, QuadratureError, QuadratureSpec};

/// Uplink model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UplinkParams {
    /// Base-station density (points per unit area).
    pub lambda: f64,
    /// Baseline transmit power; a user at distance `R` transmits
    /// `power * R^(alpha epsilon)`.
    pub power: f64,
    /// Path-loss exponent, must exceed 2.
    pub alpha: f64,
    /// Power-control fraction in [0, 1]; 0 = fixed power, 1 = full inversion.
    pub epsilon: f64,
    /// Noise power (linear).
    pub sigma2: f64,
}

impl UplinkParams {
    pub fn new(lambda: f64, power: f64, alpha: f64, epsilon: f64, sigma2: f64) -> Result<Self> {
        let p = UplinkParams {
            lambda,
            power,
            alpha,
            epsilon,
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
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::invalid(
                "epsilon",
                format!(
                    "power-control fraction must lie in [0, 1], got {}",
                    self.epsilon
                ),
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
}

/// Intensity of the interfering-user field at distance `d` from the tagged
/// base station: `lambda (1 - exp(-pi lambda d^2))`.
pub fn interferer_intensity(d: f64, lambda: f64) -> Result<f64> {
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(Error::invalid(
            "lambda",
            format!("must be > 0, got {lambda}"),
        ));
    }
    if d < 0.0 || d.is_nan() {
        return Err(Error::invalid(
            "d",
            format!("distance must be >= 0, got {d}"),
        ));
    }
    Ok(lambda * (1.0 - (-PI * lambda * d * d).exp()))
}

/// Truncated Rayleigh density of an interferer's own link distance given its
/// distance `d_i` to the tagged base station:
/// `2 pi lambda r exp(-lambda pi r^2) / (1 - exp(-pi lambda d_i^2))` on `[0, d_i]`.
pub fn conditional_link_distance_pdf(r: f64, d_i: f64, lambda: f64) -> Result<f64> {
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(Error::invalid(
            "lambda",
            format!("must be > 0, got {lambda}"),
        ));
    }
    if d_i <= 0.0 || !d_i.is_finite() {
        return Err(Error::invalid("d_i", format!("must be > 0, got {d_i}")));
    }
    if r < 0.0 || r.is_nan() {
        return Err(Error::invalid("r", format!("must be >= 0, got {r}")));
    }
    if r > d_i {
        return Err(Error::invalid(
            "r",
            format!(
                "link distance r = {r} cannot exceed the distance d_i = {d_i} to the tagged BS"
            ),
        ));
    }
    let num = 2.0 * PI * lambda * r * (-lambda * PI * r * r).exp();
    let den = 1.0 - (-PI * lambda * d_i * d_i).exp();
    Ok(num / den)
}

/// Which level of the nested uplink quadrature failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Level {
    Outer,
    Inner,
}

/// Normalized interference exponent.
///
/// In units where distance is scaled by sqrt(pi lambda), the Laplace
/// transform is `exp(-2 I(B))` with
/// `I(B) = int_0^inf e^-w T(sqrt(w), B w^(-alpha eps/2)) dw`,
/// `T(a, q) = int_a^inf y/(1 + q y^alpha) dy = q^(-2/alpha) K(q^(2/alpha) a^2) / 2`,
/// obtained from the paper's double integral by swapping the integration
/// order; `K` is the interference-tail kernel shared with the downlink.
fn interference_exponent(
    b_coef: f64,
    alpha: f64,
    epsilon: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let inner_spec = spec.tightened(10.0);
    let inner_failure: RefCell<Option<QuadratureError>> = RefCell::new(None);
    let integrand = |w: f64| -> f64 {
        let decay = (-w).exp();
        if decay == 0.0 || w <= 0.0 {
            return 0.0;
        }
        let q = b_coef * w.powf(-alpha * epsilon / 2.0);
        if q == 0.0 {
            // Only reachable for b_coef = 0, which the callers screen out.
            return f64::NAN;
        }
        let scale = q.powf(-2.0 / alpha);
        if scale == 0.0 {
            return 0.0;
        }
        let c = q.powf(2.0 / alpha) * w;
        match numerics::interference_tail(c, alpha, &inner_spec) {
            Ok(k) => decay * 0.5 * scale * k,
            Err(e) => {
                let q_err = match e {
                    Error::Quadrature { source, .. } => source,
                    other => QuadratureError::InvalidDomain {
                        reason: other.to_string(),
                    },
                };
                inner_failure.borrow_mut().get_or_insert(q_err);
                f64::NAN
            }
        }
    };
    let result = numerics::integrate(integrand, Domain::SemiInfinite { a: 0.0 }, spec);
    match result {
        Ok(q) => Ok(q.value),
        Err(outer_err) => {
            let (level, source) = match inner_failure.into_inner() {
                Some(inner) => (Level::Inner, inner),
                None => (Level::Outer, outer_err),
            };
            Err(Error::quadrature(
                match level {
                    Level::Inner => "uplink interference transform, inner (link-distance) integral",
                    Level::Outer => "uplink interference transform, outer (interferer) integral",
                },
                source,
            ))
        }
    }
}

/// Laplace transform of the uplink interference at the tagged base station:
/// `exp(-2 pi lambda int_0^inf int_0^{x^2}
///      [1 + (s p)^-1 u^(-alpha eps/2) x^alpha]^-1 pi lambda e^(-lambda pi u) du x dx)`.
pub fn uplink_laplace(s: f64, params: &UplinkParams) -> Result<f64> {
    params.validate()?;
    if s < 0.0 || !s.is_finite() {
        return Err(Error::invalid(
            "s",
            format!("must be finite and >= 0, got {s}"),
        ));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let b_coef = (s * params.power).recip()
        * (PI * params.lambda).powf(-params.alpha * (1.0 - params.epsilon) / 2.0);
    let exponent = interference_exponent(
        b_coef,
        params.alpha,
        params.epsilon,
        &QuadratureSpec::default(),
    )?;
    Ok((-2.0 * exponent).exp())
}

/// The coverage theorem's interference factor nu at normalized serving
/// distance `t = r sqrt(pi lambda)`: the Laplace transform evaluated at
/// `s = tau p^-1 r^(alpha (1 - eps))`.
fn nu_normalized(t: f64, tau: f64, alpha: f64, epsilon: f64, spec: &QuadratureSpec) -> Result<f64> {
    let b_coef = tau.recip() * t.powf(-alpha * (1.0 - epsilon));
    if b_coef == f64::INFINITY {
        // Serving distance 0: no interferer can be closer, nu -> 1.
        return Ok(1.0);
    }
    let exponent = interference_exponent(b_coef, alpha, epsilon, spec)?;
    Ok((-2.0 * exponent).exp())
}

/// Uplink coverage probability under the truncated-Rayleigh interference
/// model:
/// `2 pi lambda int_0^inf r exp(-pi lambda r^2 - tau p^-1 r^(alpha(1-eps)) sigma^2) nu(r) dr`.
///
/// The serving-distance integral is evaluated in normalized units, with nu
/// memoized across the outer quadrature's evaluation points (nu dominates the
/// cost). `sigma2 = 0` is supported and, together with `epsilon = 1`,
/// collapses to `exp(-rho(tau, alpha))`.
pub fn uplink_coverage(tau: f64, params: &UplinkParams) -> Result<f64> {
    params.validate()?;
    if tau <= 0.0 || !tau.is_finite() {
        return Err(Error::invalid(
            "tau",
            format!("must be finite and > 0, got {tau}"),
        ));
    }
    let alpha = params.alpha;
    let epsilon = params.epsilon;
    let noise_coef = tau * params.sigma2 / params.power
        * (PI * params.lambda).powf(-alpha * (1.0 - epsilon) / 2.0);
    let nu_spec = QuadratureSpec::default().tightened(10.0);
    let cache: RefCell<HashMap<u64, f64>> = RefCell::new(HashMap::new());
    let failure: RefCell<Option<Error>> = RefCell::new(None);

    let integrand = |t: f64| -> f64 {
        let mut envelope = 2.0 * t * (-t * t).exp();
        if noise_coef > 0.0 {
            envelope *= (-noise_coef * t.powf(alpha * (1.0 - epsilon))).exp();
        }
        if envelope == 0.0 || t <= 0.0 {
            return 0.0;
        }
        if let Some(&nu) = cache.borrow().get(&t.to_bits()) {
            return envelope * nu;
        }
        match nu_normalized(t, tau, alpha, epsilon, &nu_spec) {
            Ok(nu) => {
                cache.borrow_mut().insert(t.to_bits(), nu);
                envelope * nu
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };

    let result = numerics::integrate(
        integrand,
        Domain::SemiInfinite { a: 0.0 },
        &QuadratureSpec::default(),
    );
    match result {
        Ok(q) => Ok(q.value.clamp(0.0, 1.0)),
        Err(outer) => Err(failure.into_inner().unwrap_or_else(|| {
            Error::quadrature("uplink coverage, serving-distance integral", outer)
        })),
    }
}

/// Full-channel-inversion (`epsilon = 1`), interference-limited closed form:
/// `exp(-rho(tau, alpha))`. Density- and power-free by construction.
pub fn uplink_coverage_full_inversion(tau: f64, alpha: f64) -> Result<f64> {
    if tau <= 0.0 || !tau.is_finite() {
        return Err(Error::invalid(
            "tau",
            format!("must be finite and > 0, got {tau}"),
        ));
    }
    Ok((-numerics::rho(tau, alpha)?).exp())
}
