//! Uplink Monte Carlo with true cell structure: users are assigned to their
//! actual nearest station and exactly one user per cell transmits. The
//! analytic model's independence approximations are deliberately absent here,
//! so analytic-versus-simulation gaps measure those approximations. For the
//! same reason no analytic tail compensation is applied (unlike the downlink
//! and HetNet simulators): the exact far-field mean would itself lean on the
//! approximate link-distance law, so truncation is handled by window sizing
//! alone.
//!
//! Palm construction: the typical user sits at the origin and is the active
//! user of its (tagged) cell; the uplink SINR is measured at the tagged
//! station.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::Result;
use crate::point_process::{sample_disk_points, Point, SiteGrid, Window};
use crate::uplink::UplinkParams;

use super::downlink::resolve_radius;
use super::{
    choose_window_radius, empty_window_error, pow_neg_half_alpha, run_trials, CoverageEstimate,
    SimConfig, TrialOutcome, MAX_EMPTY_REDRAWS,
};

/// Simulate uplink SINR coverage at the tagged station.
///
/// `lambda_u` is the user density; populate cells generously (the analytic
/// model assumes one active user per cell everywhere, so `lambda_u`
/// well above `lambda` keeps empty cells rare). Per trial:
///
/// 1. sample the station PPP and the user PPP in the window;
/// 2. tag the station nearest the origin; the typical user at the origin is
///    its active uplink user, transmitting `p R^(alpha epsilon)` over its
///    serving distance `R`;
/// 3. assign every other user to its nearest station; each non-tagged station
///    with at least one user picks one uniformly at random; empty cells stay
///    silent;
/// 4. interference at the tagged station sums `p R_i^(alpha eps) G_i D_i^-alpha`
///    over active users with true link distances `R_i`.
pub fn simulate_uplink(
    params: &UplinkParams,
    lambda_u: f64,
    cfg: &SimConfig,
) -> Result<CoverageEstimate> {
    params.validate()?;
    cfg.validate()?;
    if lambda_u <= 0.0 || !lambda_u.is_finite() {
        return Err(crate::error::Error::invalid(
            "lambda_u",
            format!("user density must be finite and > 0, got {lambda_u}"),
        ));
    }
    let radius = resolve_radius(cfg, || {
        choose_window_radius(
            params.lambda,
            params.alpha,
            cfg.truncation_fraction,
            cfg.min_expected_bs,
        )
    })?;
    let window = Window::disk(Point::ORIGIN, radius)?;
    let p = *params;

    run_trials(cfg, radius, 0, move |rng| {
        let stat = uplink_trial(&p, lambda_u, &window, rng)?;
        Ok(TrialOutcome {
            stat,
            tier: None,
            covering: None,
        })
    })
}

fn uplink_trial(
    params: &UplinkParams,
    lambda_u: f64,
    window: &Window,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let mut attempts = 0;
    let stations: Vec<Point> = loop {
        let s = sample_disk_points(params.lambda, window.outer_radius(), rng);
        if !s.is_empty() {
            break s;
        }
        attempts += 1;
        if attempts >= MAX_EMPTY_REDRAWS {
            return Err(empty_window_error("uplink"));
        }
    };
    let users = sample_disk_points(lambda_u, window.outer_radius(), rng);

    let r = window.outer_radius();
    let grid = SiteGrid::new(&stations, -r, -r, r, r);
    let (tagged, tagged_d2) = grid.nearest(Point::ORIGIN);
    let tagged_pos = stations[tagged];
    let serving_distance = tagged_d2.sqrt().max(f64::MIN_POSITIVE.sqrt());

    // Users per cell in counting-sort layout, stable in user order.
    let n_sites = stations.len();
    let mut site_of: Vec<u32> = Vec::with_capacity(users.len());
    let mut link_d2: Vec<f64> = Vec::with_capacity(users.len());
    let mut start = vec![0u32; n_sites + 1];
    for &u in &users {
        let (si, d2) = grid.nearest(u);
        site_of.push(si as u32);
        link_d2.push(d2);
        start[si + 1] += 1;
    }
    for i in 0..n_sites {
        start[i + 1] += start[i];
    }
    let mut cursor = start.clone();
    let mut ordered = vec![0u32; users.len()];
    for (ui, &si) in site_of.iter().enumerate() {
        let slot = cursor[si as usize] as usize;
        ordered[slot] = ui as u32;
        cursor[si as usize] += 1;
    }

    let alpha = params.alpha;
    let ae = alpha * params.epsilon;
    // R_i^(alpha eps) from the squared link distance, with fast paths for
    // the common exponents.
    let tx_power_factor = |r2: f64| -> f64 {
        if ae == 0.0 {
            1.0
        } else if ae == 2.0 {
            r2
        } else if ae == 4.0 {
            r2 * r2
        } else {
            r2.powf(ae * 0.5)
        }
    };

    // One active user per non-tagged populated cell, chosen uniformly.
    // Selection draws happen in station order, then fades in the same order,
    // keeping the stream layout independent of the threshold grid.
    let mut active: Vec<u32> = Vec::with_capacity(n_sites);
    for si in 0..n_sites {
        let lo = start[si] as usize;
        let hi = start[si + 1] as usize;
        if si == tagged || lo == hi {
            continue;
        }
        active.push(ordered[lo + rng.random_range(0..hi - lo)]);
    }

    let h: f64 = Exp1.sample(rng);
    let mut interference = 0.0;
    for &ui in &active {
        let g: f64 = Exp1.sample(rng);
        let u = users[ui as usize];
        let d2_to_tagged = u.dist2(tagged_pos).max(f64::MIN_POSITIVE);
        let r_i2 = link_d2[ui as usize].max(f64::MIN_POSITIVE);
        interference +=
            params.power * tx_power_factor(r_i2) * g * pow_neg_half_alpha(d2_to_tagged, alpha);
    }

    // Typical user's received power: H p R^(alpha eps) R^-alpha.
    let signal = h * params.power * serving_distance.powf(ae - alpha);
    Ok(signal / (params.sigma2 + interference))
}
