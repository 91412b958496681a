//! k-tier HetNet Monte Carlo under both cell-selection rules. The
//! instantaneous rule is evaluated exactly (every station's SINR is checked),
//! so it remains valid for thresholds at or below 0 dB where the analytic
//! union-bound argument does not apply.
//!
//! The per-trial statistic is the normalized margin `max SINR/tau_tier`
//! (average rule: serving station only), so one run yields the coverage curve
//! over a grid of common threshold multipliers.

use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::Result;
use crate::hetnet::{AssociationRule, HetNetParams};
use crate::point_process::{sample_disk_points, Point, Window};

use super::downlink::resolve_radius;
use super::{
    empty_window_error, pow_neg_half_alpha, run_trials, CoverageEstimate, SimConfig, TrialOutcome,
    MAX_EMPTY_REDRAWS,
};

/// Window radius for a k-tier network.
///
/// The tail-versus-in-window ratio bound of [`choose_window_radius`] is
/// independent of per-tier powers and densities once the typical serving
/// distance is fixed, so the single-tier rule generalizes with
/// `r_typ = sum_i a_i / (2 sqrt(S_i))` (the mean serving distance under
/// average-power association) and the population bound applied to the total
/// density. Reduces exactly to the single-tier rule at k = 1.
pub(crate) fn hetnet_window_radius(params: &HetNetParams, cfg: &SimConfig) -> Result<f64> {
    let total_density: f64 = params.tiers.iter().map(|t| t.lambda).sum();
    let mut r_typ = 0.0;
    for i in 0..params.k() {
        let weight = params.tiers[i].lambda * params.tiers[i].power.powf(2.0 / params.alpha);
        let a_i = weight / params.weighted_density();
        let s_i = params.effective_density(i);
        r_typ += a_i * 0.5 / s_i.sqrt();
    }
    let delta = cfg.truncation_fraction;
    let tail_radius = r_typ * ((1.0 + delta) / delta).powf(1.0 / (params.alpha - 2.0));
    let count_radius = (cfg.min_expected_bs / (PI * total_density)).sqrt();
    Ok(tail_radius.max(count_radius))
}

/// Simulate k-tier HetNet coverage.
///
/// Grid semantics: grid value `g` scales every tier threshold, i.e. the
/// trial covers `g` iff SINR > `g tau_i` for the relevant station(s). A grid
/// containing 1.0 therefore reads out coverage at the nominal thresholds,
/// and tiers with `tau_i = 1` turn the grid into a plain common-threshold
/// sweep. For the instantaneous rule, `max_covering_bs` reports the largest
/// number of stations that simultaneously met their nominal condition.
pub fn simulate_hetnet(params: &HetNetParams, cfg: &SimConfig) -> Result<CoverageEstimate> {
    params.validate()?;
    cfg.validate()?;
    let radius = resolve_radius(cfg, || hetnet_window_radius(params, cfg))?;
    let window = Window::disk(Point::ORIGIN, radius)?;
    let tail_mean: f64 = params
        .tiers
        .iter()
        .map(|t| super::downlink::interference_tail_mean(t.lambda, t.power, params.alpha, radius))
        .sum();
    let p = params.clone();

    run_trials(cfg, radius, p.k(), move |rng| {
        hetnet_trial(&p, &window, tail_mean, rng)
    })
}

fn hetnet_trial(
    params: &HetNetParams,
    window: &Window,
    tail_mean: f64,
    rng: &mut ChaCha8Rng,
) -> Result<TrialOutcome> {
    let k = params.k();
    // Tier-by-tier draw order (points, then fades) keeps the k = 1 stream
    // identical to the downlink simulator's.
    let mut positions: Vec<Vec<Point>> = Vec::with_capacity(k);
    let mut fades: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut attempts = 0;
    loop {
        positions.clear();
        fades.clear();
        let mut total = 0usize;
        for tier in &params.tiers {
            let pts = sample_disk_points(tier.lambda, window.outer_radius(), rng);
            total += pts.len();
            let mut f = Vec::with_capacity(pts.len());
            for _ in 0..pts.len() {
                let g: f64 = Exp1.sample(rng);
                f.push(g);
            }
            positions.push(pts);
            fades.push(f);
        }
        if total > 0 {
            break;
        }
        attempts += 1;
        if attempts >= MAX_EMPTY_REDRAWS {
            return Err(empty_window_error("hetnet"));
        }
    }

    // Received powers and total.
    let alpha = params.alpha;
    let mut total_power = 0.0;
    for (ti, tier) in params.tiers.iter().enumerate() {
        for (pos, &fade) in positions[ti].iter().zip(&fades[ti]) {
            let d2 = (pos.x * pos.x + pos.y * pos.y).max(f64::MIN_POSITIVE);
            total_power += tier.power * fade * pow_neg_half_alpha(d2, alpha);
        }
    }

    match params.rule {
        AssociationRule::AveragePower => {
            // Serving station maximizes p_i d^-alpha 	<=> minimizes
            // d^2 p_i^(-2/alpha); ties resolve to the lowest (tier, index).
            let mut best_key = f64::INFINITY;
            let mut best = (0usize, 0usize);
            for (ti, tier) in params.tiers.iter().enumerate() {
                let weight = tier.power.powf(-2.0 / alpha);
                for (pi, pos) in positions[ti].iter().enumerate() {
                    let key = (pos.x * pos.x + pos.y * pos.y) * weight;
                    if key < best_key {
                        best_key = key;
                        best = (ti, pi);
                    }
                }
            }
            let (ti, pi) = best;
            let pos = positions[ti][pi];
            let d2 = (pos.x * pos.x + pos.y * pos.y).max(f64::MIN_POSITIVE);
            let received = params.tiers[ti].power * fades[ti][pi] * pow_neg_half_alpha(d2, alpha);
            let sinr = received / (params.sigma2 + tail_mean + (total_power - received));
            Ok(TrialOutcome {
                stat: sinr / params.tiers[ti].tau,
                tier: Some(ti),
                covering: None,
            })
        }
        AssociationRule::InstantaneousPower => {
            // Exact evaluation over every station in every tier.
            let mut best_margin = 0.0f64;
            let mut covering = 0u32;
            for (ti, tier) in params.tiers.iter().enumerate() {
                for (pos, &fade) in positions[ti].iter().zip(&fades[ti]) {
                    let d2 = (pos.x * pos.x + pos.y * pos.y).max(f64::MIN_POSITIVE);
                    let received = tier.power * fade * pow_neg_half_alpha(d2, alpha);
                    let sinr = received / (params.sigma2 + tail_mean + (total_power - received));
                    let margin = sinr / tier.tau;
                    if margin > best_margin {
                        best_margin = margin;
                    }
                    if sinr > tier.tau {
                        covering += 1;
                    }
                }
            }
            Ok(TrialOutcome {
                stat: best_margin,
                tier: None,
                covering: Some(covering),
            })
        }
    }
}
