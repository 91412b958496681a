//! Run configuration: the single validated record every command produces and
//! every engine call consumes. dB-to-linear conversion happens exactly once,
//! when flags are parsed into this record (config files carry linear values
//! apart from the threshold grid, which stays in dB).

use std::path::Path;

use serde::{Deserialize, Serialize};

use cellcov_core::curve::db_grid;
use cellcov_core::hetnet::{AssociationRule, HetNetParams, TierSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Downlink,
    Uplink,
    Hetnet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Analytic,
    Simulate,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Avg,
    Inst,
}

/// Threshold grid in dB: `start:step:stop`, inclusive. For HetNets the grid
/// is an offset added to every tier threshold (0 dB = nominal thresholds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start_db: f64,
    pub step_db: f64,
    pub stop_db: f64,
}

impl GridSpec {
    pub fn single(db: f64) -> Self {
        GridSpec {
            start_db: db,
            step_db: 1.0,
            stop_db: db,
        }
    }

    /// Parse `"start:step:stop"` or a single `"value"`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| -> Result<f64, String> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("grid component '{s}' is not a number"))
        };
        match parts.as_slice() {
            [single] => Ok(GridSpec::single(num(single)?)),
            [start, step, stop] => Ok(GridSpec {
                start_db: num(start)?,
                step_db: num(step)?,
                stop_db: num(stop)?,
            }),
            _ => Err(format!(
                "grid '{text}' must be a single dB value or start:step:stop"
            )),
        }
    }

    pub fn db_values(&self) -> Result<Vec<f64>, cellcov_core::Error> {
        db_grid(self.start_db, self.step_db, self.stop_db)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierCfg {
    pub lambda: f64,
    pub power: f64,
    /// Linear SINR threshold.
    pub tau: f64,
}

/// One fully resolved run. JSON output embeds this record verbatim, including
/// the seed and (after a simulation) the computed window radius, so any run
/// can be reproduced exactly by feeding the emitted config back in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub mode: Mode,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_power")]
    pub power: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Noise power, linear; 0 = interference-limited.
    #[serde(default)]
    pub sigma2: f64,
    /// Uplink power-control fraction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Uplink user density (simulation only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_u: Option<f64>,
    /// HetNet tiers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiers: Option<Vec<TierCfg>>,
    /// HetNet association rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
    /// Lognormal shadowing dB spread (downlink simulation).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shadowing_db: Option<f64>,
    pub grid: GridSpec,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_truncation")]
    pub truncation_fraction: f64,
    #[serde(default = "default_min_bs")]
    pub min_expected_bs: f64,
    /// Fixed simulation window radius; absent = sized automatically, and the
    /// computed radius is written back here in emitted configs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_radius: Option<f64>,
    /// Max allowed |analytic - empirical| gap in validate mode.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_lambda() -> f64 {
    1.0
}
fn default_power() -> f64 {
    1.0
}
fn default_alpha() -> f64 {
    4.0
}
fn default_trials() -> u64 {
    10_000
}
fn default_truncation() -> f64 {
    1e-3
}
fn default_min_bs() -> f64 {
    500.0
}
fn default_tolerance() -> f64 {
    0.02
}

impl RunConfig {
    pub fn new(scenario: Scenario, mode: Mode, grid: GridSpec) -> Self {
        RunConfig {
            scenario,
            mode,
            lambda: default_lambda(),
            power: default_power(),
            alpha: default_alpha(),
            sigma2: 0.0,
            epsilon: None,
            lambda_u: None,
            tiers: None,
            rule: None,
            shadowing_db: None,
            grid,
            trials: default_trials(),
            seed: 0,
            truncation_fraction: default_truncation(),
            min_expected_bs: default_min_bs(),
            window_radius: None,
            tolerance: default_tolerance(),
        }
    }

    /// Semantic validation with key-path diagnostics. Numeric range checks
    /// are delegated to the engine's own parameter types where possible.
    pub fn validate(&self) -> Result<(), String> {
        self.grid.db_values().map_err(|e| format!("grid: {e}"))?;
        match self.scenario {
            Scenario::Downlink => {
                if self.tiers.is_some() || self.rule.is_some() || self.epsilon.is_some() {
                    return Err("downlink config cannot carry tiers, rule, or epsilon".into());
                }
            }
            Scenario::Uplink => {
                if self.tiers.is_some() || self.rule.is_some() || self.shadowing_db.is_some() {
                    return Err("uplink config cannot carry tiers, rule, or shadowing_db".into());
                }
                let eps = self
                    .epsilon
                    .ok_or("epsilon: required for the uplink scenario")?;
                if !(0.0..=1.0).contains(&eps) {
                    return Err(format!("epsilon: must lie in [0, 1], got {eps}"));
                }
            }
            Scenario::Hetnet => {
                if self.epsilon.is_some() || self.lambda_u.is_some() || self.shadowing_db.is_some()
                {
                    return Err(
                        "hetnet config cannot carry epsilon, lambda_u, or shadowing_db".into(),
                    );
                }
                let tiers = self
                    .tiers
                    .as_ref()
                    .ok_or("tiers: required for the hetnet scenario")?;
                if tiers.is_empty() {
                    return Err("tiers: at least one tier is required".into());
                }
                let rule = self.rule.ok_or("rule: required for the hetnet scenario")?;
                // Instantaneous-power analytics need every effective
                // threshold above 0 dB; the simulator is exact for any tau.
                if rule == Rule::Inst && self.mode != Mode::Simulate {
                    let grid_db = self.grid.db_values().map_err(|e| format!("grid: {e}"))?;
                    let min_offset = grid_db
                        .first()
                        .copied()
                        .map(cellcov_core::curve::db_to_linear)
                        .unwrap_or(1.0);
                    for (i, t) in tiers.iter().enumerate() {
                        if t.tau * min_offset <= 1.0 {
                            return Err(format!(
                                "tiers[{i}].tau: instantaneous-power analytics require every \
                                 effective threshold above 1 (0 dB) so that at most one station \
                                 can satisfy its coverage condition; tau = {} with minimum grid \
                                 offset {min_offset} violates this (simulate mode accepts it)",
                                t.tau
                            ));
                        }
                    }
                }
            }
        }
        if let Some(lu) = self.lambda_u {
            if lu <= 0.0 || lu.is_nan() {
                return Err(format!("lambda_u: must be > 0, got {lu}"));
            }
        }
        Ok(())
    }

    pub fn hetnet_params(&self, tau_multiplier: f64) -> Result<HetNetParams, cellcov_core::Error> {
        let tiers = self
            .tiers
            .as_ref()
            .expect("validated hetnet config")
            .iter()
            .map(|t| TierSpec::new(t.lambda, t.power, t.tau * tau_multiplier))
            .collect::<Result<Vec<_>, _>>()?;
        let rule = match self.rule.expect("validated hetnet config") {
            Rule::Avg => AssociationRule::AveragePower,
            Rule::Inst => AssociationRule::InstantaneousPower,
        };
        HetNetParams::new(tiers, self.alpha, self.sigma2, rule)
    }

    /// Effective uplink user density: explicit value, or 30x the station
    /// density (keeps empty cells below about 0.04%).
    pub fn effective_lambda_u(&self) -> f64 {
        self.lambda_u.unwrap_or(30.0 * self.lambda)
    }
}

/// Parse a strict-keys JSON config file.
pub fn parse_config_file(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let cfg: RunConfig =
        serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))?;
    cfg.validate()
        .map_err(|e| format!("config {}: {e}", path.display()))?;
    Ok(cfg)
}

/// Parse the tier flag syntax `lambda,power,tau(linear);...`.
pub fn parse_tiers(text: &str) -> Result<Vec<TierCfg>, String> {
    let mut tiers = Vec::new();
    for (i, chunk) in text.split(';').enumerate() {
        let fields: Vec<&str> = chunk.split(',').collect();
        if fields.len() != 3 {
            return Err(format!(
                "tier {i} ('{chunk}') must have three comma-separated fields lambda,power,tau"
            ));
        }
        let parse = |name: &str, s: &str| -> Result<f64, String> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("tier {i} {name} '{s}' is not a number"))
        };
        tiers.push(TierCfg {
            lambda: parse("lambda", fields[0])?,
            power: parse("power", fields[1])?,
            tau: parse("tau", fields[2])?,
        });
    }
    Ok(tiers)
}

/// `--snr-db` accepts `inf` (interference-limited) or a dB value; converted
/// to linear noise power against the configured transmit power.
pub fn sigma2_from_snr_db(snr_db: &str, power: f64) -> Result<f64, String> {
    if snr_db.eq_ignore_ascii_case("inf") {
        return Ok(0.0);
    }
    let db: f64 = snr_db
        .parse()
        .map_err(|_| format!("snr-db '{snr_db}' is neither a number nor 'inf'"))?;
    Ok(power / cellcov_core::curve::db_to_linear(db))
}

/// Built-in presets reproducing named setups.
pub fn apply_preset(name: &str, cfg: &mut RunConfig) -> Result<(), String> {
    match name {
        // Uplink validation regime: 4 stations per square km, alpha = 4,
        // unit power, interference-limited, full channel inversion.
        "fig5-uplink" => {
            if cfg.scenario != Scenario::Uplink {
                return Err("preset fig5-uplink applies to the uplink command".into());
            }
            cfg.lambda = 4e-6;
            cfg.power = 1.0;
            cfg.alpha = 4.0;
            cfg.sigma2 = 0.0;
            if cfg.epsilon.is_none() {
                cfg.epsilon = Some(1.0);
            }
            cfg.grid = GridSpec {
                start_db: -10.0,
                step_db: 1.0,
                stop_db: 20.0,
            };
            cfg.truncation_fraction = 4e-3;
            cfg.min_expected_bs = 150.0;
            Ok(())
        }
        // Interference-limited downlink at alpha = 4.
        "dl-nonoise-a4" => {
            if cfg.scenario != Scenario::Downlink {
                return Err("preset dl-nonoise-a4 applies to the downlink command".into());
            }
            cfg.lambda = 1.0;
            cfg.power = 1.0;
            cfg.alpha = 4.0;
            cfg.sigma2 = 0.0;
            cfg.grid = GridSpec {
                start_db: -10.0,
                step_db: 1.0,
                stop_db: 20.0,
            };
            Ok(())
        }
        other => Err(format!(
            "unknown preset '{other}' (available: fig5-uplink, dl-nonoise-a4)"
        )),
    }
}
