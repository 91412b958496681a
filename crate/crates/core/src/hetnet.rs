//! Analytic coverage for k-tier heterogeneous downlink networks under the
//! two standard cell-selection rules: maximum average received power and
//! maximum instantaneous SINR (the latter analytically valid for per-tier
//! thresholds above 0 dB, where at most one base station can be covering).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, QuadratureSpec};

/// One tier of base stations: density, transmit power, SINR threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierSpec {
    pub lambda: f64,
    pub power: f64,
    pub tau: f64,
}

impl TierSpec {
    pub fn new(lambda: f64, power: f64, tau: f64) -> Result<Self> {
        let t = TierSpec { lambda, power, tau };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tier lambda", self.lambda),
            ("tier power", self.power),
            ("tier tau", self.tau),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::invalid(
                    "tier",
                    format!("{name} must be finite and > 0, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// Cell-selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssociationRule {
    /// Serve from the station with the highest average received power
    /// (nearest station after power weighting).
    AveragePower,
    /// Covered if any station's instantaneous SINR clears its tier threshold.
    InstantaneousPower,
}

/// k-tier network parameters; the path-loss exponent is shared across tiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HetNetParams {
    pub tiers: Vec<TierSpec>,
    pub alpha: f64,
    pub sigma2: f64,
    pub rule: AssociationRule,
}

impl HetNetParams {
    pub fn new(
        tiers: Vec<TierSpec>,
        alpha: f64,
        sigma2: f64,
        rule: AssociationRule,
    ) -> Result<Self> {
        let p = HetNetParams {
            tiers,
            alpha,
            sigma2,
            rule,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tiers.is_empty() {
            return Err(Error::invalid("tiers", "at least one tier is required"));
        }
        for t in &self.tiers {
            t.validate()?;
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

    pub fn k(&self) -> usize {
        self.tiers.len()
    }

    /// `sum_j lambda_j p_j^(2/alpha)`, the power-weighted density.
    pub(crate) fn weighted_density(&self) -> f64 {
        self.tiers
            .iter()
            .map(|t| t.lambda * t.power.powf(2.0 / self.alpha))
            .sum()
    }

    /// `S_i = sum_j lambda_j (p_j / p_i)^(2/alpha)`, the effective density
    /// seen by a user served from tier `i`.
    pub(crate) fn effective_density(&self, i: usize) -> f64 {
        self.weighted_density() / self.tiers[i].power.powf(2.0 / self.alpha)
    }

    fn check_tier(&self, i: usize) -> Result<()> {
        if i >= self.tiers.len() {
            return Err(Error::invalid(
                "tier index",
                format!("index {i} out of range for {} tiers", self.tiers.len()),
            ));
        }
        Ok(())
    }

    fn require_rule(&self, rule: AssociationRule, op: &'static str) -> Result<()> {
        if self.rule != rule {
            return Err(Error::invalid(
                "rule",
                format!(
                    "{op} applies to the {rule:?} association rule, params use {:?}",
                    self.rule
                ),
            ));
        }
        Ok(())
    }

    fn require_taus_above_one(&self) -> Result<()> {
        for (i, t) in self.tiers.iter().enumerate() {
            if t.tau <= 1.0 {
                return Err(Error::invalid(
                    "tau",
                    format!(
                        "instantaneous-power analysis requires every tier threshold above 1 \
                         (0 dB) so that at most one BS across all tiers can satisfy its \
                         coverage condition; tier {i} has tau = {}",
                        t.tau
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Probability that the typical user associates with tier `i` under the
/// average-power rule: `lambda_i p_i^(2/alpha) / sum_j lambda_j p_j^(2/alpha)`.
pub fn association_probability(i: usize, params: &HetNetParams) -> Result<f64> {
    params.validate()?;
    params.check_tier(i)?;
    params.require_rule(AssociationRule::AveragePower, "association_probability")?;
    let w = params.tiers[i].lambda * params.tiers[i].power.powf(2.0 / params.alpha);
    Ok(w / params.weighted_density())
}

/// Density of the serving distance conditioned on association with tier `i`:
/// `(1/a_i) 2 pi lambda_i r exp(-pi r^2 S_i)`.
pub fn serving_distance_conditional_pdf(r: f64, i: usize, params: &HetNetParams) -> Result<f64> {
    params.validate()?;
    params.check_tier(i)?;
    params.require_rule(
        AssociationRule::AveragePower,
        "serving_distance_conditional_pdf",
    )?;
    if r < 0.0 || r.is_nan() {
        return Err(Error::invalid("r", format!("must be >= 0, got {r}")));
    }
    let a_i = association_probability(i, params)?;
    let s_i = params.effective_density(i);
    Ok(2.0 * PI * params.tiers[i].lambda * r * (-PI * r * r * s_i).exp() / a_i)
}

/// Coverage under average-power association:
/// `sum_i 2 pi lambda_i int_0^inf r exp(-p_i^-1 tau_i r^alpha sigma^2)
///  exp(-pi r^2 S_i (1 + rho(tau_i, alpha))) dr`.
///
/// Every tier integral is evaluated by quadrature in normalized units; the
/// no-noise per-tier closed form is reserved for tests.
pub fn hetnet_coverage_avg(params: &HetNetParams) -> Result<f64> {
    params.validate()?;
    params.require_rule(AssociationRule::AveragePower, "hetnet_coverage_avg")?;
    let alpha = params.alpha;
    let spec = QuadratureSpec::default();
    let mut total = 0.0;
    for (i, tier) in params.tiers.iter().enumerate() {
        let rho_i = numerics::rho(tier.tau, alpha)?;
        let s_i = params.effective_density(i);
        // w = pi S_i r^2 normalizes the tier integral to
        // (lambda_i / S_i) int_0^inf exp(-w (1 + rho_i) - c_i w^(alpha/2)) dw.
        let noise_coef = tier.tau * params.sigma2 / tier.power * (PI * s_i).powf(-alpha / 2.0);
        let integral =
            numerics::exp_linear_power_integral(1.0 + rho_i, noise_coef, alpha / 2.0, &spec)?;
        total += tier.lambda / s_i * integral;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Coverage under instantaneous-power association (all thresholds above 1):
/// `2 pi sum_i lambda_i int_0^inf exp(-x^2 (tau_i/p_i)^(2/alpha) zeta(alpha) M)
///  exp(-tau_i sigma^2 x^alpha / p_i) x dx` with `M = sum_m lambda_m p_m^(2/alpha)`.
pub fn hetnet_coverage_inst(params: &HetNetParams) -> Result<f64> {
    params.validate()?;
    params.require_rule(AssociationRule::InstantaneousPower, "hetnet_coverage_inst")?;
    params.require_taus_above_one()?;
    let alpha = params.alpha;
    let zeta = numerics::zeta_alpha(alpha)?;
    let m = params.weighted_density();
    let spec = QuadratureSpec::default();
    let mut total = 0.0;
    for tier in &params.tiers {
        // v = x^2 A_i with A_i = (tau_i/p_i)^(2/alpha) zeta M normalizes the
        // tier integral to (pi lambda_i / A_i) int exp(-v - c_i v^(alpha/2)) dv.
        let a_i = (tier.tau / tier.power).powf(2.0 / alpha) * zeta * m;
        let noise_coef = tier.tau * params.sigma2 / tier.power * a_i.powf(-alpha / 2.0);
        let integral = numerics::exp_linear_power_integral(1.0, noise_coef, alpha / 2.0, &spec)?;
        total += PI * tier.lambda / a_i * integral;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Interference-limited instantaneous-power closed form:
/// `(pi / zeta(alpha)) sum_i lambda_i p_i^(2/alpha) tau_i^(-2/alpha) / M`.
pub fn hetnet_coverage_inst_nonoise(params: &HetNetParams) -> Result<f64> {
    params.validate()?;
    params.require_rule(
        AssociationRule::InstantaneousPower,
        "hetnet_coverage_inst_nonoise",
    )?;
    params.require_taus_above_one()?;
    let alpha = params.alpha;
    let zeta = numerics::zeta_alpha(alpha)?;
    let m = params.weighted_density();
    let num: f64 = params
        .tiers
        .iter()
        .map(|t| t.lambda * t.power.powf(2.0 / alpha) * t.tau.powf(-2.0 / alpha))
        .sum();
    Ok(PI / zeta * num / m)
}
