//! Acceptance suite: every release criterion as one test with its tolerance
//! pinned in code. Each test prints a single PASS line (visible with
//! `cargo test -- --nocapture`) naming the criterion it certifies.

use std::f64::consts::PI;

use cellcov_core::curve::{db_grid, db_to_linear, CoverageCurve};
use cellcov_core::downlink::{
    self, coverage_alpha4_snr, coverage_general, coverage_interflimited, DownlinkParams,
    ShadowingSpec,
};
use cellcov_core::hetnet::{
    hetnet_coverage_avg, hetnet_coverage_inst, hetnet_coverage_inst_nonoise, AssociationRule,
    HetNetParams, TierSpec,
};
use cellcov_core::numerics::rho;
use cellcov_core::point_process::{sample_ppp, transform, Point, TransformSpec, Window};
use cellcov_core::sim::{
    compare_curves, simulate_downlink, simulate_hetnet, simulate_uplink, LognormalShadowing,
    SimConfig,
};
use cellcov_core::uplink::{uplink_coverage, uplink_coverage_full_inversion, UplinkParams};

fn linear_grid_31() -> Vec<f64> {
    db_grid(-10.0, 1.0, 20.0)
        .unwrap()
        .into_iter()
        .map(db_to_linear)
        .collect()
}

#[test]
fn acceptance_01_downlink_closed_form() {
    let v = coverage_interflimited(1.0, 4.0).unwrap();
    let exact = 1.0 / (1.0 + PI / 4.0);
    assert!(
        (v - exact).abs() <= 1e-9,
        "coverage(tau=1, alpha=4) = {v}, want {exact} within 1e-9"
    );
    // The quoted two-digit figure for the fully loaded network.
    assert!((v - 0.56).abs() < 0.005);
    println!("ACCEPTANCE 01 PASS: interference-limited closed form 1/(1+pi/4) = {v:.9}");
}

#[test]
fn acceptance_02_downlink_internal_consistency() {
    let grid = linear_grid_31();
    // alpha = 4, SNR = 10: the general quadrature against the Q-function form.
    let params = DownlinkParams::new(1.0, 1.0, 4.0, 0.1).unwrap();
    let mut worst = 0.0f64;
    for &tau in &grid {
        let g = coverage_general(tau, &params).unwrap();
        let c = coverage_alpha4_snr(tau, 1.0, 10.0).unwrap();
        worst = worst.max((g - c).abs());
    }
    assert!(
        worst <= 1e-6,
        "max |general - alpha4_snr| = {worst:.3e} exceeds 1e-6"
    );
    // SNR = 1e12 against the no-noise closed form.
    let params = DownlinkParams::new(1.0, 1.0, 4.0, 1e-12).unwrap();
    let mut worst_nn = 0.0f64;
    for &tau in &grid {
        let g = coverage_general(tau, &params).unwrap();
        let c = 1.0 / (1.0 + rho(tau, 4.0).unwrap());
        worst_nn = worst_nn.max((g - c).abs());
    }
    assert!(
        worst_nn <= 1e-4,
        "max |general(SNR=1e12) - 1/(1+rho)| = {worst_nn:.3e} exceeds 1e-4"
    );
    println!(
        "ACCEPTANCE 02 PASS: downlink quadrature vs closed forms, gaps {worst:.2e} (SNR=10) / {worst_nn:.2e} (SNR=1e12)"
    );
}

#[test]
fn acceptance_03_downlink_sim_vs_analytic() {
    let grid = linear_grid_31();
    for &(alpha, delta, seed) in &[(3.0, 1e-2, 301u64), (4.0, 1e-3, 304u64)] {
        let params = DownlinkParams::new(1.0, 1.0, alpha, 0.0).unwrap();
        let cfg = SimConfig::new(100_000, seed, grid.clone())
            .unwrap()
            .with_truncation_fraction(delta)
            .unwrap();
        let est = simulate_downlink(&params, &cfg, None).unwrap();
        let analytic =
            CoverageCurve::from_linear_grid(&grid, |tau| coverage_interflimited(tau, alpha))
                .unwrap();
        let report = compare_curves(&analytic, &est, 0.01).unwrap();
        assert!(
            report.pass,
            "alpha={alpha}: max gap {} exceeds 0.01",
            report.max_abs_gap
        );
        assert!(
            report.ci_cover_fraction >= 0.90,
            "alpha={alpha}: only {:.0}% of points inside the 95% CI",
            report.ci_cover_fraction * 100.0
        );
        println!(
            "ACCEPTANCE 03 PASS: downlink sim vs analytic alpha={alpha}, max gap {:.4}, CI cover {:.0}%",
            report.max_abs_gap,
            report.ci_cover_fraction * 100.0
        );
    }
}

#[test]
fn acceptance_04_sir_density_invariance() {
    let grid = linear_grid_31();
    let mut estimates = Vec::new();
    for &(lambda, seed) in &[(1.0, 41u64), (4.0, 42u64)] {
        let params = DownlinkParams::new(lambda, 1.0, 4.0, 0.0).unwrap();
        let cfg = SimConfig::new(100_000, seed, grid.clone()).unwrap();
        estimates.push(simulate_downlink(&params, &cfg, None).unwrap());
    }
    let (a, b) = (&estimates[0], &estimates[1]);
    for (i, &tau) in grid.iter().enumerate() {
        let gap = (a.coverage[i] - b.coverage[i]).abs();
        let allowed = a.ci_half_width[i] + b.ci_half_width[i];
        assert!(
            gap <= allowed,
            "density invariance violated at tau={tau:.3}: gap {gap:.4} > {allowed:.4}"
        );
    }
    println!(
        "ACCEPTANCE 04 PASS: sigma2=0 coverage at lambda and 4*lambda agrees within combined CIs"
    );
}

#[test]
fn acceptance_05_uplink_sim_vs_analytic() {
    // lambda = 4e-6 /m^2, alpha = 4, p = 1, sigma2 = 0, eps in {0, 0.5, 1}.
    // lambda_u = 30 lambda keeps the empty-cell fraction below 4e-4 (the
    // analytic model assumes every cell is active); delta = 4e-3 with 150
    // expected stations bounds the truncation bias well below the 0.03 leash.
    let grid = linear_grid_31();
    let lambda = 4e-6;
    for &(eps, seed) in &[(0.0, 51u64), (0.5, 52u64), (1.0, 533u64)] {
        let params = UplinkParams::new(lambda, 1.0, 4.0, eps, 0.0).unwrap();
        let cfg = SimConfig::new(100_000, seed, grid.clone())
            .unwrap()
            .with_truncation_fraction(4e-3)
            .unwrap()
            .with_min_expected_bs(150.0)
            .unwrap();
        let est = simulate_uplink(&params, 30.0 * lambda, &cfg).unwrap();
        let analytic =
            CoverageCurve::from_linear_grid(&grid, |tau| uplink_coverage(tau, &params)).unwrap();
        let report = compare_curves(&analytic, &est, 0.03).unwrap();
        assert!(
            report.pass,
            "eps={eps}: max gap {} exceeds 0.03",
            report.max_abs_gap
        );
        println!(
            "ACCEPTANCE 05 PASS: uplink sim vs analytic coverage at eps={eps}, max gap {:.4}",
            report.max_abs_gap
        );
    }
}

#[test]
fn acceptance_06_uplink_closed_form() {
    let grid = linear_grid_31();
    for &alpha in &[3.0, 4.0] {
        let params = UplinkParams::new(1.0, 1.0, alpha, 1.0, 0.0).unwrap();
        let mut worst = 0.0f64;
        for &tau in &grid {
            let quad = uplink_coverage(tau, &params).unwrap();
            let closed = uplink_coverage_full_inversion(tau, alpha).unwrap();
            worst = worst.max((quad - closed).abs());
        }
        assert!(
            worst <= 1e-6,
            "alpha={alpha}: |uplink quadrature - exp(-rho)| = {worst:.3e} exceeds 1e-6"
        );
        // Uplink falls faster than downlink at every threshold.
        for &tau in &grid {
            let ul = uplink_coverage_full_inversion(tau, alpha).unwrap();
            let dl = coverage_interflimited(tau, alpha).unwrap();
            assert!(ul < dl, "alpha={alpha}, tau={tau}: exp(-rho) !< 1/(1+rho)");
        }
        println!(
            "ACCEPTANCE 06 PASS: full-inversion closed form at alpha={alpha}, max gap {worst:.2e}"
        );
    }
}

/// Macro (sparse, strong) / pico / femto (dense, weak) preset with the
/// density ratios 1:10:100 and power ratios 100:10:1.
fn three_tier_preset(tau: f64, rule: AssociationRule) -> HetNetParams {
    HetNetParams::new(
        vec![
            TierSpec::new(0.01, 100.0, tau).unwrap(),
            TierSpec::new(0.1, 10.0, tau).unwrap(),
            TierSpec::new(1.0, 1.0, tau).unwrap(),
        ],
        4.0,
        0.0,
        rule,
    )
    .unwrap()
}

#[test]
fn acceptance_07_hetnet_average_power() {
    let grid = linear_grid_31();
    // Equal thresholds collapse the average-power coverage to the
    // SIR-invariant form.
    let mut worst = 0.0f64;
    for &tau in &grid {
        let het =
            hetnet_coverage_avg(&three_tier_preset(tau, AssociationRule::AveragePower)).unwrap();
        let expect = 1.0 / (1.0 + rho(tau, 4.0).unwrap());
        worst = worst.max((het - expect).abs());
    }
    assert!(
        worst <= 1e-8,
        "max |avg coverage - 1/(1+rho)| = {worst:.3e} exceeds 1e-8"
    );

    // Simulator agreement: unit tier thresholds make the grid a tau sweep.
    let params = three_tier_preset(1.0, AssociationRule::AveragePower);
    let cfg = SimConfig::new(100_000, 71, grid.clone()).unwrap();
    let est = simulate_hetnet(&params, &cfg).unwrap();
    let analytic = CoverageCurve::from_linear_grid(&grid, |tau| {
        hetnet_coverage_avg(&three_tier_preset(tau, AssociationRule::AveragePower))
    })
    .unwrap();
    let report = compare_curves(&analytic, &est, 0.01).unwrap();
    assert!(
        report.pass,
        "hetnet avg sim gap {} exceeds 0.01",
        report.max_abs_gap
    );
    println!(
        "ACCEPTANCE 07 PASS: 3-tier average-power coverage, closed-form gap {worst:.2e}, sim gap {:.4}",
        report.max_abs_gap
    );
}

#[test]
fn acceptance_08_hetnet_instantaneous_power() {
    let params = three_tier_preset(2.0, AssociationRule::InstantaneousPower);

    // Equal tau = 2, sigma2 = 0: the density-free value 2/(pi sqrt(2)).
    let closed = hetnet_coverage_inst_nonoise(&params).unwrap();
    let exact = 2.0 / (PI * 2.0f64.sqrt());
    assert!(
        (closed - exact).abs() <= 1e-8,
        "closed form {closed} vs {exact}"
    );

    // General quadrature against the no-noise closed form.
    let quad = hetnet_coverage_inst(&params).unwrap();
    assert!(
        (quad - closed).abs() <= 1e-6,
        "quadrature {quad} vs closed form {closed}"
    );

    // Simulator agreement at the nominal thresholds, plus the at-most-one
    // covering station condition in every trial.
    let cfg = SimConfig::new(100_000, 81, vec![1.0]).unwrap();
    let est = simulate_hetnet(&params, &cfg).unwrap();
    assert!(
        (est.coverage[0] - exact).abs() <= 0.01,
        "inst sim {} vs {exact}",
        est.coverage[0]
    );
    assert!(
        est.max_covering_bs.unwrap() <= 1,
        "{} stations covered simultaneously with all taus above 0 dB",
        est.max_covering_bs.unwrap()
    );
    println!(
        "ACCEPTANCE 08 PASS: instantaneous-power coverage {exact:.6}, sim {:.4}, max covering stations {}",
        est.coverage[0],
        est.max_covering_bs.unwrap()
    );
}

#[test]
fn acceptance_09_shadowing_equivalence() {
    // Lognormal shadowing sigma_dB = 8 versus the no-shadowing curve at the
    // displaced density lambda_D = lambda E[chi^(1/2)].
    let grid = linear_grid_31();
    let lambda = 1.0;
    let sigma_db = 8.0;
    let lambda_d = downlink::shadowing_equivalent_density(
        lambda,
        4.0,
        &ShadowingSpec::LogNormalDb { sigma_db },
    )
    .unwrap();

    let params = DownlinkParams::new(lambda, 1.0, 4.0, 0.1).unwrap();
    let cfg = SimConfig::new(100_000, 91, grid.clone())
        .unwrap()
        // Shadowing inflates the mean interference tail by E[chi] ~ 5.5, so
        // the window is sized with a tighter delta.
        .with_truncation_fraction(5e-4)
        .unwrap();
    let est = simulate_downlink(&params, &cfg, Some(LognormalShadowing { sigma_db })).unwrap();

    let displaced = DownlinkParams::new(lambda_d, 1.0, 4.0, 0.1).unwrap();
    let analytic =
        CoverageCurve::from_linear_grid(&grid, |tau| coverage_general(tau, &displaced)).unwrap();
    let report = compare_curves(&analytic, &est, 0.015).unwrap();
    assert!(
        report.pass,
        "shadowing equivalence gap {} exceeds 0.015",
        report.max_abs_gap
    );
    println!(
        "ACCEPTANCE 09 PASS: shadowed sim vs analytic at lambda_D = {lambda_d:.4}, max gap {:.4}",
        report.max_abs_gap
    );
}

#[test]
fn acceptance_10_point_process_oracles() {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // (a) Empirical PGFL of f = exp(-||x||^-4) against exp(-pi sqrt(pi)).
    {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let r_w = 40.0;
        let w = Window::disk(Point::ORIGIN, r_w).unwrap();
        let draws = 100_000;
        let mut total = 0.0;
        for _ in 0..draws {
            let pts = cellcov_core::point_process::sample_ppp(1.0, &w, rng.random()).unwrap();
            let mut prod = 1.0;
            for p in &pts.points {
                let d2 = p.x * p.x + p.y * p.y;
                prod *= (-1.0 / (d2 * d2)).exp();
            }
            total += prod;
        }
        let mean = total / draws as f64;
        let expect = (-PI * PI.sqrt()).exp();
        let rel = ((mean - expect) / expect).abs();
        assert!(
            rel <= 0.02,
            "PGFL mean {mean:.6e} vs {expect:.6e} ({rel:.3})"
        );
        println!(
            "ACCEPTANCE 10a PASS: PGFL oracle within {:.2}%",
            rel * 100.0
        );
    }

    // (b) Campbell mean of p ||x||^-4 over the annulus [1, 20] against
    // 2 pi lambda p/(alpha-2) (a^(2-alpha) - b^(2-alpha)).
    {
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        let w = Window::annulus(Point::ORIGIN, 1.0, 20.0).unwrap();
        let draws = 100_000;
        let mut total = 0.0;
        for _ in 0..draws {
            let pts = cellcov_core::point_process::sample_ppp(1.0, &w, rng.random()).unwrap();
            total += pts
                .points
                .iter()
                .map(|p| {
                    let d2 = p.x * p.x + p.y * p.y;
                    1.0 / (d2 * d2)
                })
                .sum::<f64>();
        }
        let mean = total / draws as f64;
        let expect = downlink::mean_interference_annulus(1.0, 1.0, 4.0, 1.0, 20.0).unwrap();
        let rel = ((mean - expect) / expect).abs();
        assert!(rel <= 0.02, "Campbell mean {mean} vs {expect} ({rel:.3})");
        println!(
            "ACCEPTANCE 10b PASS: Campbell oracle within {:.2}%",
            rel * 100.0
        );
    }

    // (c) Nearest-distance CDF within distribution distance 0.01.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let w = Window::disk(Point::ORIGIN, 5.0).unwrap();
        let draws = 100_000;
        let mut dists = Vec::with_capacity(draws);
        for _ in 0..draws {
            let pts = cellcov_core::point_process::sample_ppp(1.0, &w, rng.random()).unwrap();
            if let Some(min) = pts
                .points
                .iter()
                .map(|p| p.norm())
                .min_by(|a, b| a.partial_cmp(b).unwrap())
            {
                dists.push(min);
            }
        }
        dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = dists.len() as f64;
        let mut sup = 0.0f64;
        for (i, &r) in dists.iter().enumerate() {
            let cdf = 1.0 - (-PI * r * r).exp();
            sup = sup
                .max((cdf - i as f64 / n).abs())
                .max((cdf - (i + 1) as f64 / n).abs());
        }
        assert!(sup <= 0.01, "nearest-distance CDF distance {sup}");
        println!("ACCEPTANCE 10c PASS: nearest-distance CDF distance {sup:.4}");
    }

    // (d) Thinning and superposition count statistics within 3 sigma.
    {
        let w = Window::disk(Point::ORIGIN, 3.0).unwrap();
        let draws = 20_000u64;
        let mut thinned = 0u64;
        let mut superposed = 0u64;
        for seed in 0..draws {
            let s = sample_ppp(4.0, &w, seed).unwrap();
            let t = transform(&s, &TransformSpec::Thinning { q: 0.5 }, seed ^ 0x5eed).unwrap();
            thinned += t.points.len() as u64;
            let extra = sample_ppp(1.5, &w, seed.wrapping_add(1 << 40)).unwrap();
            let u = transform(&s, &TransformSpec::Superposition { other: &extra }, 0).unwrap();
            superposed += u.points.len() as u64;
        }
        let area = w.area();
        let n = draws as f64;
        let thin_mean = thinned as f64 / n;
        let thin_expect = 2.0 * area;
        let thin_se = (thin_expect / n).sqrt();
        assert!(
            (thin_mean - thin_expect).abs() <= 3.0 * thin_se,
            "thinned mean {thin_mean} vs {thin_expect}"
        );
        let sup_mean = superposed as f64 / n;
        let sup_expect = 5.5 * area;
        let sup_se = (sup_expect / n).sqrt();
        assert!(
            (sup_mean - sup_expect).abs() <= 3.0 * sup_se,
            "superposed mean {sup_mean} vs {sup_expect}"
        );
        println!("ACCEPTANCE 10d PASS: thinning/superposition counts within 3 sigma");
    }
}
