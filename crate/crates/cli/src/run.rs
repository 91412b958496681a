//! Execute a validated [`RunConfig`] and produce its artifact.

use cellcov_core::curve::{db_to_linear, CoverageCurve};
use cellcov_core::downlink::{coverage_general, coverage_interflimited, DownlinkParams};
use cellcov_core::hetnet::{hetnet_coverage_avg, hetnet_coverage_inst};
use cellcov_core::sim::{
    compare_curves, simulate_downlink, simulate_hetnet, simulate_uplink, LognormalShadowing,
    SimConfig, ValidationReport, WindowPolicy,
};
use cellcov_core::uplink::{uplink_coverage, UplinkParams};
use cellcov_core::{CoverageEstimate, Error};

use crate::config::{Mode, Rule, RunConfig, Scenario};

/// What a run produced. The resolved config (with the computed window radius
/// filled in) travels alongside for reproducible JSON output.
#[derive(Debug, Clone, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Artifact {
    Curve(CoverageCurve),
    Estimate(CoverageEstimate),
    Report(ValidationReport),
}

pub struct RunOutcome {
    pub config: RunConfig,
    pub artifact: Artifact,
    /// False only for a failed validate run (exit code 3).
    pub pass: bool,
}

fn analytic_curve(cfg: &RunConfig, grid: &[f64]) -> Result<CoverageCurve, Error> {
    match cfg.scenario {
        Scenario::Downlink => {
            if cfg.sigma2 == 0.0 {
                CoverageCurve::from_linear_grid(grid, |tau| coverage_interflimited(tau, cfg.alpha))
            } else {
                let params = DownlinkParams::new(cfg.lambda, cfg.power, cfg.alpha, cfg.sigma2)?;
                CoverageCurve::from_linear_grid(grid, |tau| coverage_general(tau, &params))
            }
        }
        Scenario::Uplink => {
            let params = UplinkParams::new(
                cfg.lambda,
                cfg.power,
                cfg.alpha,
                cfg.epsilon.expect("validated uplink config"),
                cfg.sigma2,
            )?;
            CoverageCurve::from_linear_grid(grid, |tau| uplink_coverage(tau, &params))
        }
        Scenario::Hetnet => {
            let rule = cfg.rule.expect("validated hetnet config");
            CoverageCurve::from_linear_grid(grid, |multiplier| {
                let params = cfg.hetnet_params(multiplier)?;
                match rule {
                    Rule::Avg => hetnet_coverage_avg(&params),
                    Rule::Inst => hetnet_coverage_inst(&params),
                }
            })
        }
    }
}

fn sim_config(cfg: &RunConfig, grid: &[f64]) -> Result<SimConfig, Error> {
    let mut sim = SimConfig::new(cfg.trials, cfg.seed, grid.to_vec())?
        .with_truncation_fraction(cfg.truncation_fraction)?
        .with_min_expected_bs(cfg.min_expected_bs)?;
    if let Some(r) = cfg.window_radius {
        sim = sim.with_window_policy(WindowPolicy::Fixed(r))?;
    }
    Ok(sim)
}

fn simulate(cfg: &RunConfig, grid: &[f64]) -> Result<CoverageEstimate, Error> {
    let sim = sim_config(cfg, grid)?;
    match cfg.scenario {
        Scenario::Downlink => {
            let params = DownlinkParams::new(cfg.lambda, cfg.power, cfg.alpha, cfg.sigma2)?;
            let shadowing = cfg
                .shadowing_db
                .map(|sigma_db| LognormalShadowing { sigma_db });
            simulate_downlink(&params, &sim, shadowing)
        }
        Scenario::Uplink => {
            let params = UplinkParams::new(
                cfg.lambda,
                cfg.power,
                cfg.alpha,
                cfg.epsilon.expect("validated uplink config"),
                cfg.sigma2,
            )?;
            let lambda_u = cfg.effective_lambda_u();
            if lambda_u < 10.0 * cfg.lambda {
                eprintln!(
                    "warning: lambda_u = {lambda_u:e} is below 10x the station density; \
                     empty cells will thin the interference field relative to the analytic model"
                );
            }
            simulate_uplink(&params, lambda_u, &sim)
        }
        Scenario::Hetnet => {
            // Tier thresholds are baked into the per-trial statistic; the
            // grid multiplies them.
            let params = cfg.hetnet_params(1.0)?;
            simulate_hetnet(&params, &sim)
        }
    }
}

/// Run the configured scenario. The returned config carries the window
/// radius a simulation actually used.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, Error> {
    let grid: Vec<f64> = cfg
        .grid
        .db_values()?
        .into_iter()
        .map(db_to_linear)
        .collect();
    let mut resolved = cfg.clone();
    match cfg.mode {
        Mode::Analytic => {
            let curve = analytic_curve(cfg, &grid)?;
            Ok(RunOutcome {
                config: resolved,
                artifact: Artifact::Curve(curve),
                pass: true,
            })
        }
        Mode::Simulate => {
            let est = simulate(cfg, &grid)?;
            resolved.window_radius = Some(est.window_radius);
            Ok(RunOutcome {
                config: resolved,
                artifact: Artifact::Estimate(est),
                pass: true,
            })
        }
        Mode::Validate => {
            let curve = analytic_curve(cfg, &grid)?;
            let est = simulate(cfg, &grid)?;
            resolved.window_radius = Some(est.window_radius);
            let report = compare_curves(&curve, &est, cfg.tolerance)?;
            let pass = report.pass;
            Ok(RunOutcome {
                config: resolved,
                artifact: Artifact::Report(report),
                pass,
            })
        }
    }
}
