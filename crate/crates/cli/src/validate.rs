//! Built-in regression scenarios for `cellcov validate`: each one runs an
//! analytic result against its closed form and/or its simulation and prints a
//! PASS/FAIL line. Exit code 3 when anything fails; a machine-readable report
//! is still emitted.
//!
//! These are smoke-level checks sized for seconds of runtime; the strict
//! acceptance bounds live in the test suite.

use std::f64::consts::PI;

use cellcov_core::curve::{db_grid, db_to_linear, CoverageCurve};
use cellcov_core::downlink::{
    coverage_alpha4_snr, coverage_general, coverage_interflimited, DownlinkParams,
};
use cellcov_core::hetnet::{
    hetnet_coverage_avg, hetnet_coverage_inst, hetnet_coverage_inst_nonoise, AssociationRule,
    HetNetParams, TierSpec,
};
use cellcov_core::numerics::rho;
use cellcov_core::sim::{
    compare_curves, simulate_downlink, simulate_hetnet, simulate_uplink, SimConfig,
    ValidationReport,
};
use cellcov_core::uplink::{uplink_coverage_full_inversion, UplinkParams};
use cellcov_core::Error;

#[derive(Debug, serde::Serialize)]
pub struct ScenarioResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ValidationReport>,
}

pub const SCENARIO_NAMES: [&str; 5] = [
    "dl-nonoise-a4",
    "dl-snr10-a4",
    "ul-full-inversion",
    "hetnet-avg-equal-tau",
    "hetnet-inst-tau2",
];

fn grid_linear() -> Vec<f64> {
    db_grid(-10.0, 2.0, 20.0)
        .unwrap()
        .into_iter()
        .map(db_to_linear)
        .collect()
}

fn three_tier(tau: f64, rule: AssociationRule) -> Result<HetNetParams, Error> {
    HetNetParams::new(
        vec![
            TierSpec::new(0.01, 100.0, tau)?,
            TierSpec::new(0.1, 10.0, tau)?,
            TierSpec::new(1.0, 1.0, tau)?,
        ],
        4.0,
        0.0,
        rule,
    )
}

fn dl_nonoise_a4(trials: u64) -> Result<ScenarioResult, Error> {
    let grid = grid_linear();
    let params = DownlinkParams::new(1.0, 1.0, 4.0, 0.0)?;
    let cfg = SimConfig::new(trials, 1001, grid.clone())?;
    let est = simulate_downlink(&params, &cfg, None)?;
    let analytic = CoverageCurve::from_linear_grid(&grid, |tau| coverage_interflimited(tau, 4.0))?;
    let report = compare_curves(&analytic, &est, 0.02)?;
    Ok(ScenarioResult {
        name: "dl-nonoise-a4",
        pass: report.pass,
        detail: format!("max gap {:.4} (tol 0.02)", report.max_abs_gap),
        report: Some(report),
    })
}

fn dl_snr10_a4(trials: u64) -> Result<ScenarioResult, Error> {
    let grid = grid_linear();
    let params = DownlinkParams::new(1.0, 1.0, 4.0, 0.1)?;
    // Closed-form cross-check first.
    let mut worst = 0.0f64;
    for &tau in &grid {
        let g = coverage_general(tau, &params)?;
        let c = coverage_alpha4_snr(tau, 1.0, 10.0)?;
        worst = worst.max((g - c).abs());
    }
    if worst > 1e-6 {
        return Ok(ScenarioResult {
            name: "dl-snr10-a4",
            pass: false,
            detail: format!("quadrature vs Q-form gap {worst:.2e} exceeds 1e-6"),
            report: None,
        });
    }
    let cfg = SimConfig::new(trials, 1002, grid.clone())?;
    let est = simulate_downlink(&params, &cfg, None)?;
    let analytic = CoverageCurve::from_linear_grid(&grid, |tau| coverage_general(tau, &params))?;
    let report = compare_curves(&analytic, &est, 0.02)?;
    Ok(ScenarioResult {
        name: "dl-snr10-a4",
        pass: report.pass,
        detail: format!(
            "closed-form gap {worst:.2e}, sim max gap {:.4} (tol 0.02)",
            report.max_abs_gap
        ),
        report: Some(report),
    })
}

fn ul_full_inversion(trials: u64) -> Result<ScenarioResult, Error> {
    let grid = grid_linear();
    let lambda = 4e-6;
    let params = UplinkParams::new(lambda, 1.0, 4.0, 1.0, 0.0)?;
    let cfg = SimConfig::new(trials, 1003, grid.clone())?
        .with_truncation_fraction(4e-3)?
        .with_min_expected_bs(150.0)?;
    let est = simulate_uplink(&params, 30.0 * lambda, &cfg)?;
    let analytic =
        CoverageCurve::from_linear_grid(&grid, |tau| uplink_coverage_full_inversion(tau, 4.0))?;
    // The paper's independence approximations leave a genuine model gap near
    // 0.03; the smoke leash sits above it plus smoke-level noise.
    let report = compare_curves(&analytic, &est, 0.045)?;
    Ok(ScenarioResult {
        name: "ul-full-inversion",
        pass: report.pass,
        detail: format!(
            "max gap {:.4} vs exp(-rho) (tol 0.045; includes the documented model gap)",
            report.max_abs_gap
        ),
        report: Some(report),
    })
}

fn hetnet_avg_equal_tau(trials: u64) -> Result<ScenarioResult, Error> {
    let grid = grid_linear();
    let mut worst = 0.0f64;
    for &tau in &grid {
        let v = hetnet_coverage_avg(&three_tier(tau, AssociationRule::AveragePower)?)?;
        let expect = 1.0 / (1.0 + rho(tau, 4.0)?);
        worst = worst.max((v - expect).abs());
    }
    if worst > 1e-8 {
        return Ok(ScenarioResult {
            name: "hetnet-avg-equal-tau",
            pass: false,
            detail: format!("equal-threshold closed-form gap {worst:.2e} exceeds 1e-8"),
            report: None,
        });
    }
    let params = three_tier(1.0, AssociationRule::AveragePower)?;
    let cfg = SimConfig::new(trials, 1004, grid.clone())?;
    let est = simulate_hetnet(&params, &cfg)?;
    let analytic = CoverageCurve::from_linear_grid(&grid, |tau| {
        hetnet_coverage_avg(&three_tier(tau, AssociationRule::AveragePower)?)
    })?;
    let report = compare_curves(&analytic, &est, 0.02)?;
    Ok(ScenarioResult {
        name: "hetnet-avg-equal-tau",
        pass: report.pass,
        detail: format!(
            "closed-form gap {worst:.2e}, sim max gap {:.4} (tol 0.02)",
            report.max_abs_gap
        ),
        report: Some(report),
    })
}

fn hetnet_inst_tau2(trials: u64) -> Result<ScenarioResult, Error> {
    let params = three_tier(2.0, AssociationRule::InstantaneousPower)?;
    let exact = 2.0 / (PI * 2.0f64.sqrt());
    let closed = hetnet_coverage_inst_nonoise(&params)?;
    let quad = hetnet_coverage_inst(&params)?;
    if (closed - exact).abs() > 1e-8 || (quad - closed).abs() > 1e-6 {
        return Ok(ScenarioResult {
            name: "hetnet-inst-tau2",
            pass: false,
            detail: format!("closed form {closed} / quadrature {quad} vs exact {exact}"),
            report: None,
        });
    }
    let cfg = SimConfig::new(trials, 1005, vec![1.0])?;
    let est = simulate_hetnet(&params, &cfg)?;
    let gap = (est.coverage[0] - exact).abs();
    let at_most_one = est.max_covering_bs.unwrap_or(0) <= 1;
    Ok(ScenarioResult {
        name: "hetnet-inst-tau2",
        pass: gap <= 0.02 && at_most_one,
        detail: format!(
            "sim {:.4} vs {exact:.6} (gap {gap:.4}, tol 0.02), max covering stations {}",
            est.coverage[0],
            est.max_covering_bs.unwrap_or(0)
        ),
        report: None,
    })
}

/// Run the selected scenarios (all when `only` is empty).
pub fn run_suite(only: &[String], trials: u64) -> Result<Vec<ScenarioResult>, Error> {
    let wanted = |name: &str| only.is_empty() || only.iter().any(|o| o == name);
    let mut results = Vec::new();
    if wanted("dl-nonoise-a4") {
        results.push(dl_nonoise_a4(trials)?);
    }
    if wanted("dl-snr10-a4") {
        results.push(dl_snr10_a4(trials)?);
    }
    if wanted("ul-full-inversion") {
        results.push(ul_full_inversion(trials)?);
    }
    if wanted("hetnet-avg-equal-tau") {
        results.push(hetnet_avg_equal_tau(trials)?);
    }
    if wanted("hetnet-inst-tau2") {
        results.push(hetnet_inst_tau2(trials)?);
    }
    Ok(results)
}
