//! Downlink Monte Carlo: typical user at the origin (Slivnyak construction),
//! serving station chosen by maximum average received power, exponential
//! fades on every link, optional lognormal shadowing.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::downlink::DownlinkParams;
use crate::error::Result;
use crate::point_process::{sample_disk_points, Point, Window};

use super::{
    choose_window_radius, empty_window_error, pow_neg_half_alpha, run_trials, CoverageEstimate,
    SimConfig, TrialOutcome, WindowPolicy, MAX_EMPTY_REDRAWS,
};

/// Lognormal shadowing with unit median, parameterized by its dB spread.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LognormalShadowing {
    pub sigma_db: f64,
}

pub(crate) fn resolve_radius(cfg: &SimConfig, auto: impl FnOnce() -> Result<f64>) -> Result<f64> {
    match cfg.window_policy {
        WindowPolicy::Auto => auto(),
        WindowPolicy::Fixed(r) => Ok(r),
    }
}

/// Mean interference arriving from beyond the window radius,
/// `2 pi lambda p E[chi] / (alpha - 2) R^(2-alpha)` (Campbell's theorem).
/// Added to every trial's interference so the estimator is centred on the
/// infinite-network model; only the (negligible, O(R^(2-2 alpha))) tail
/// fluctuation is lost to truncation.
pub(crate) fn interference_tail_mean(lambda: f64, power: f64, alpha: f64, radius: f64) -> f64 {
    2.0 * std::f64::consts::PI * lambda * power / (alpha - 2.0) * radius.powf(2.0 - alpha)
}

/// Simulate downlink SINR coverage.
///
/// Per trial: sample the station PPP in a disk around the origin, draw unit
/// exponential fades (and shadowing gains when requested), serve from the
/// station with the highest average received power, and record the SINR
/// against the threshold grid, with the expected out-of-window interference
/// added as a deterministic term. Trials that draw an empty window are
/// redrawn from the same stream.
pub fn simulate_downlink(
    params: &DownlinkParams,
    cfg: &SimConfig,
    shadowing: Option<LognormalShadowing>,
) -> Result<CoverageEstimate> {
    params.validate()?;
    cfg.validate()?;
    if let Some(s) = shadowing {
        if s.sigma_db < 0.0 || !s.sigma_db.is_finite() {
            return Err(crate::error::Error::invalid(
                "sigma_db",
                format!("must be finite and >= 0, got {}", s.sigma_db),
            ));
        }
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
    // Shadowing scales the mean far-field interference by E[chi].
    let chi_mean = match shadowing {
        Some(s) => {
            let t = s.sigma_db * std::f64::consts::LN_10 / 10.0;
            (0.5 * t * t).exp()
        }
        None => 1.0,
    };
    let tail = interference_tail_mean(params.lambda, params.power, params.alpha, radius) * chi_mean;
    let p = *params;

    run_trials(cfg, radius, 0, move |rng| {
        let stat = downlink_trial(&p, &window, shadowing, tail, rng)?;
        Ok(TrialOutcome {
            stat,
            tier: None,
            covering: None,
        })
    })
}

/// One SINR draw; also used by the HetNet simulator's k = 1 path through an
/// identical draw order (stations, then fades).
pub(crate) fn downlink_trial(
    params: &DownlinkParams,
    window: &Window,
    shadowing: Option<LognormalShadowing>,
    tail_mean: f64,
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
            return Err(empty_window_error("downlink"));
        }
    };

    let n = stations.len();
    let mut fades = Vec::with_capacity(n);
    for _ in 0..n {
        let g: f64 = Exp1.sample(rng);
        fades.push(g);
    }
    let mut chi = Vec::new();
    if let Some(s) = shadowing {
        chi.reserve(n);
        for _ in 0..n {
            let z: f64 = StandardNormal.sample(rng);
            chi.push(10f64.powf(s.sigma_db * z / 10.0));
        }
    }

    // Serving station maximizes the average received power p chi d^-alpha,
    // i.e. minimizes d^2 / chi^(2/alpha).
    let mut serving = 0usize;
    let mut serving_key = f64::INFINITY;
    let two_over_alpha = 2.0 / params.alpha;
    for (i, s) in stations.iter().enumerate() {
        let d2 = s.x * s.x + s.y * s.y;
        let key = if chi.is_empty() {
            d2
        } else {
            d2 / chi[i].powf(two_over_alpha)
        };
        if key < serving_key {
            serving_key = key;
            serving = i;
        }
    }

    let mut total = 0.0;
    let mut received = 0.0;
    for (i, s) in stations.iter().enumerate() {
        let d2 = (s.x * s.x + s.y * s.y).max(f64::MIN_POSITIVE);
        let mut pow = params.power * fades[i] * pow_neg_half_alpha(d2, params.alpha);
        if !chi.is_empty() {
            pow *= chi[i];
        }
        total += pow;
        if i == serving {
            received = pow;
        }
    }
    Ok(received / (params.sigma2 + tail_mean + (total - received)))
}

/// Serving distances from the downlink construction, for distribution tests.
#[cfg(test)]
pub(crate) fn sample_serving_distances(
    params: &DownlinkParams,
    window: &Window,
    trials: u64,
    master_seed: u64,
) -> Vec<f64> {
    use rand::SeedableRng;
    let mut out = Vec::with_capacity(trials as usize);
    for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(i + 1);
        let stations = sample_disk_points(params.lambda, window.outer_radius(), &mut rng);
        if let Some(min) = stations
            .iter()
            .map(|s| s.norm())
            .min_by(|a, b| a.partial_cmp(b).unwrap())
        {
            out.push(min);
        }
    }
    out
}
