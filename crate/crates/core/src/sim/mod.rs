//! Ground-truth Monte Carlo simulation of the three network scenarios from
//! their generative models (PPP base stations, Rayleigh fades, power-law path
//! loss), plus the curve comparison used to validate every analytic result.
//!
//! Determinism: each trial draws from its own ChaCha8 stream indexed by trial
//! number, and per-threshold successes are accumulated by integer addition,
//! so results are bit-identical for a given `(scenario, config, seed)` under
//! any parallel schedule.

mod downlink;
mod hetnet;
mod uplink;

pub use downlink::{simulate_downlink, LognormalShadowing};
pub use hetnet::simulate_hetnet;
pub use uplink::simulate_uplink;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{validate_linear_grid, CoverageCurve};
use crate::error::{Error, Result};

/// How the simulation window radius is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WindowPolicy {
    /// Size the window from the truncation tolerance and the minimum expected
    /// station count (see [`choose_window_radius`]).
    Auto,
    /// Use a fixed radius (truncation studies).
    Fixed(f64),
}

/// Monte Carlo configuration shared by all scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Number of independent trials.
    pub trials: u64,
    /// Truncation tolerance: the expected out-of-window interference is kept
    /// below this fraction of the in-window interference.
    pub truncation_fraction: f64,
    /// Master seed; trial `i` uses stream `i + 1` of this seed.
    pub master_seed: u64,
    /// Strictly increasing positive linear thresholds.
    pub threshold_grid: Vec<f64>,
    /// Lower bound on the expected number of stations in the window.
    pub min_expected_bs: f64,
    pub window_policy: WindowPolicy,
}

impl SimConfig {
    pub fn new(trials: u64, master_seed: u64, threshold_grid: Vec<f64>) -> Result<Self> {
        let cfg = SimConfig {
            trials,
            truncation_fraction: 1e-3,
            master_seed,
            threshold_grid,
            min_expected_bs: 500.0,
            window_policy: WindowPolicy::Auto,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_truncation_fraction(mut self, delta: f64) -> Result<Self> {
        self.truncation_fraction = delta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_window_policy(mut self, policy: WindowPolicy) -> Result<Self> {
        self.window_policy = policy;
        self.validate()?;
        Ok(self)
    }

    pub fn with_min_expected_bs(mut self, min_expected_bs: f64) -> Result<Self> {
        self.min_expected_bs = min_expected_bs;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if !(self.truncation_fraction > 0.0 && self.truncation_fraction <= 0.1) {
            return Err(Error::invalid(
                "truncation_fraction",
                format!("must lie in (0, 0.1], got {}", self.truncation_fraction),
            ));
        }
        if self.min_expected_bs < 1.0 || !self.min_expected_bs.is_finite() {
            return Err(Error::invalid(
                "min_expected_bs",
                format!("must be >= 1, got {}", self.min_expected_bs),
            ));
        }
        validate_linear_grid(&self.threshold_grid)?;
        if let WindowPolicy::Fixed(r) = self.window_policy {
            if r <= 0.0 || !r.is_finite() {
                return Err(Error::invalid(
                    "window_policy",
                    format!("fixed radius must be finite and > 0, got {r}"),
                ));
            }
        }
        Ok(())
    }
}

/// Empirical coverage over the threshold grid, with 95% confidence intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    /// Linear thresholds (copied from the config grid).
    pub thresholds: Vec<f64>,
    /// Fraction of trials with SINR above each threshold; nonincreasing
    /// along the grid by construction.
    pub coverage: Vec<f64>,
    /// Normal-approximation 95% CI half-width, `1.96 sqrt(p(1-p)/n)`.
    pub ci_half_width: Vec<f64>,
    pub trials: u64,
    /// Window radius actually used.
    pub window_radius: f64,
    /// Average-power HetNet runs: trials associated with each tier.
    pub tier_association_counts: Option<Vec<u64>>,
    /// Instantaneous-power HetNet runs: largest number of stations that
    /// simultaneously satisfied their tier's coverage condition in any trial.
    pub max_covering_bs: Option<u32>,
}

impl CoverageEstimate {
    /// The grid check is a post-condition, not a mutation: per-trial
    /// statistics are compared against a sorted grid, so violation means a
    /// harness bug.
    fn check_monotone(&self) -> Result<()> {
        for pair in self.coverage.windows(2) {
            if pair[1] > pair[0] + 1e-15 {
                return Err(Error::Simulation(
                    "empirical coverage increased along the threshold grid".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Window radius for a single-tier scenario.
///
/// Two constraints, the larger radius wins:
/// - tail bound: the expected interference from beyond `R`,
///   `2 pi lambda p/(alpha-2) R^(2-alpha)`, stays below `delta` times the
///   expected in-window interference from beyond the typical serving distance
///   `r_typ = 1/(2 sqrt(lambda))`, giving
///   `R >= r_typ ((1 + delta)/delta)^(1/(alpha-2))` — the transmit power
///   cancels between the two sides;
/// - population: the expected station count satisfies
///   `pi lambda R^2 >= min_expected_bs`.
pub fn choose_window_radius(
    lambda: f64,
    alpha: f64,
    delta: f64,
    min_expected_bs: f64,
) -> Result<f64> {
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(Error::invalid(
            "lambda",
            format!("must be > 0, got {lambda}"),
        ));
    }
    if alpha <= 2.0 || !alpha.is_finite() {
        return Err(Error::invalid(
            "alpha",
            format!("window sizing requires alpha > 2, got {alpha}"),
        ));
    }
    if !(delta > 0.0 && delta <= 0.1) {
        return Err(Error::invalid(
            "delta",
            format!("must lie in (0, 0.1], got {delta}"),
        ));
    }
    let r_typ = 0.5 / lambda.sqrt();
    let tail_radius = r_typ * ((1.0 + delta) / delta).powf(1.0 / (alpha - 2.0));
    let count_radius = (min_expected_bs / (std::f64::consts::PI * lambda)).sqrt();
    Ok(tail_radius.max(count_radius))
}

/// Per-trial outcome handed back to the harness.
pub(crate) struct TrialOutcome {
    /// Coverage margin: the trial covers threshold `tau` iff `stat > tau`.
    pub stat: f64,
    /// Tier the typical user associated with (HetNet average-power rule).
    pub tier: Option<usize>,
    /// Number of stations simultaneously covering (HetNet instantaneous rule).
    pub covering: Option<u32>,
}

struct Accumulator {
    /// hist[i] = number of trials whose stat first fails at grid index i
    /// (i = len means the stat cleared the whole grid).
    first_fail_hist: Vec<u64>,
    tier_counts: Vec<u64>,
    max_covering: u32,
    has_tiers: bool,
    has_covering: bool,
}

impl Accumulator {
    fn new(grid_len: usize, tiers: usize) -> Self {
        Accumulator {
            first_fail_hist: vec![0; grid_len + 1],
            tier_counts: vec![0; tiers],
            max_covering: 0,
            has_tiers: false,
            has_covering: false,
        }
    }

    fn add(&mut self, grid: &[f64], outcome: &TrialOutcome) {
        let idx = grid.partition_point(|&t| t < outcome.stat);
        self.first_fail_hist[idx] += 1;
        if let Some(tier) = outcome.tier {
            self.has_tiers = true;
            self.tier_counts[tier] += 1;
        }
        if let Some(c) = outcome.covering {
            self.has_covering = true;
            self.max_covering = self.max_covering.max(c);
        }
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        for (a, b) in self.first_fail_hist.iter_mut().zip(&other.first_fail_hist) {
            *a += b;
        }
        for (a, b) in self.tier_counts.iter_mut().zip(&other.tier_counts) {
            *a += b;
        }
        self.max_covering = self.max_covering.max(other.max_covering);
        self.has_tiers |= other.has_tiers;
        self.has_covering |= other.has_covering;
        self
    }
}

/// Run `cfg.trials` independent trials in parallel and assemble the estimate.
///
/// `trial` receives the trial's dedicated RNG stream. Successes are counted
/// per threshold with associative integer addition, so the reduction order
/// cannot affect the result.
pub(crate) fn run_trials<F>(
    cfg: &SimConfig,
    window_radius: f64,
    tiers: usize,
    trial: F,
) -> Result<CoverageEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<TrialOutcome> + Sync,
{
    cfg.validate()?;
    let grid = &cfg.threshold_grid;
    let accum = (0..cfg.trials)
        .into_par_iter()
        .try_fold(
            || Accumulator::new(grid.len(), tiers),
            |mut acc, i| -> Result<Accumulator> {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);
                rng.set_stream(i + 1);
                let outcome = trial(&mut rng)?;
                acc.add(grid, &outcome);
                Ok(acc)
            },
        )
        .try_reduce(
            || Accumulator::new(grid.len(), tiers),
            |a, b| Ok(a.merge(b)),
        )?;

    // Coverage count at grid index g = number of trials whose first failing
    // threshold lies beyond g = suffix sum of the histogram.
    let n = cfg.trials as f64;
    let mut coverage = Vec::with_capacity(grid.len());
    let mut running = accum.first_fail_hist[grid.len()];
    let mut cover_counts = vec![0u64; grid.len()];
    for g in (0..grid.len()).rev() {
        cover_counts[g] = running;
        running += accum.first_fail_hist[g];
    }
    let mut ci = Vec::with_capacity(grid.len());
    for &c in &cover_counts {
        let p = c as f64 / n;
        coverage.push(p);
        ci.push(1.96 * (p * (1.0 - p) / n).sqrt());
    }

    let estimate = CoverageEstimate {
        thresholds: grid.clone(),
        coverage,
        ci_half_width: ci,
        trials: cfg.trials,
        window_radius,
        tier_association_counts: accum.has_tiers.then_some(accum.tier_counts),
        max_covering_bs: accum.has_covering.then_some(accum.max_covering),
    };
    estimate.check_monotone()?;
    Ok(estimate)
}

/// Upper bound on resampling attempts for a trial that drew an empty window.
/// Under any sane configuration the probability of even one empty draw is
/// astronomically small, so exhausting this signals misconfiguration.
pub(crate) const MAX_EMPTY_REDRAWS: usize = 10;

pub(crate) fn empty_window_error(scenario: &str) -> Error {
    Error::Simulation(format!(
        "{scenario}: window was empty {MAX_EMPTY_REDRAWS} times in a row; \
         the intensity or window radius is misconfigured"
    ))
}

/// Per-threshold comparison of an analytic curve against an empirical
/// estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Linear thresholds shared by both curves.
    pub thresholds: Vec<f64>,
    pub analytic: Vec<f64>,
    pub empirical: Vec<f64>,
    /// 95% CI half-widths of the empirical values.
    pub ci_half_width: Vec<f64>,
    pub gap: Vec<f64>,
    pub max_abs_gap: f64,
    /// Fraction of grid points where the analytic value lies inside the
    /// empirical 95% confidence interval.
    pub ci_cover_fraction: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compare an analytic coverage curve against an empirical estimate on the
/// same threshold grid. Passes iff the largest absolute gap is within `tol`.
pub fn compare_curves(
    analytic: &CoverageCurve,
    empirical: &CoverageEstimate,
    tol: f64,
) -> Result<ValidationReport> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::invalid("tol", format!("must be > 0, got {tol}")));
    }
    if analytic.tau_linear.len() != empirical.thresholds.len() {
        return Err(Error::GridMismatch(format!(
            "analytic grid has {} points, empirical has {}",
            analytic.tau_linear.len(),
            empirical.thresholds.len()
        )));
    }
    for (i, (&a, &e)) in analytic
        .tau_linear
        .iter()
        .zip(&empirical.thresholds)
        .enumerate()
    {
        if (a - e).abs() > 1e-9 * a.abs().max(e.abs()) {
            return Err(Error::GridMismatch(format!(
                "thresholds differ at index {i}: {a} vs {e}"
            )));
        }
    }
    let mut gap = Vec::with_capacity(analytic.len());
    let mut inside = 0usize;
    let mut max_abs_gap = 0.0f64;
    for i in 0..analytic.len() {
        let g = analytic.coverage[i] - empirical.coverage[i];
        max_abs_gap = max_abs_gap.max(g.abs());
        if g.abs() <= empirical.ci_half_width[i] {
            inside += 1;
        }
        gap.push(g);
    }
    Ok(ValidationReport {
        thresholds: analytic.tau_linear.clone(),
        analytic: analytic.coverage.clone(),
        empirical: empirical.coverage.clone(),
        ci_half_width: empirical.ci_half_width.clone(),
        gap,
        max_abs_gap,
        ci_cover_fraction: inside as f64 / analytic.len() as f64,
        tolerance: tol,
        pass: max_abs_gap <= tol,
    })
}

/// Raise `base` to the power `-alpha/2`, with fast paths for the common
/// exponents. `base` is a squared distance.
#[inline]
pub(crate) fn pow_neg_half_alpha(base: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (base * base)
    } else if alpha == 3.0 {
        1.0 / (base * base.sqrt())
    } else {
        base.powf(-alpha * 0.5)
    }
}
