//! cellcov: SINR coverage for Poisson cellular networks.
//!
//! Subcommands: `downlink`, `uplink`, `hetnet` (analytic / simulate /
//! validate per scenario), `validate` (built-in regression suite), `sweep`
//! (cartesian parameter sweeps into long-format output). All state arrives
//! through flags or a strict JSON config; no environment variables.
//!
//! Exit codes: 0 ok, 1 invalid configuration, 2 numerical failure,
//! 3 validation failure (a machine-readable report is still emitted).

mod config;
mod output;
mod run;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cellcov_core::Error;
use config::{
    apply_preset, parse_config_file, parse_tiers, sigma2_from_snr_db, GridSpec, Mode, Rule,
    RunConfig, Scenario,
};

#[derive(Parser)]
#[command(
    name = "cellcov",
    about = "SINR coverage probability for Poisson cellular networks: analytic curves and Monte Carlo validation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-tier downlink coverage.
    Downlink(ScenarioArgs),
    /// Uplink coverage with fractional power control.
    Uplink(ScenarioArgs),
    /// k-tier heterogeneous downlink coverage.
    Hetnet(ScenarioArgs),
    /// Run the built-in regression scenarios.
    Validate(ValidateArgs),
    /// Cartesian parameter sweep emitting long-format output.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Load a strict JSON config instead of flags (other parameter flags are
    /// rejected when this is set).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Apply a named preset (fig5-uplink, dl-nonoise-a4) before other flags.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// analytic | simulate | validate
    #[arg(long, default_value = "analytic")]
    mode: ModeArg,

    /// Station density (per unit area).
    #[arg(long)]
    lambda: Option<f64>,

    /// Transmit power (linear).
    #[arg(long)]
    power: Option<f64>,

    /// Path-loss exponent (> 2).
    #[arg(long)]
    alpha: Option<f64>,

    /// Noise power (linear); mutually exclusive with --snr-db.
    #[arg(long, conflicts_with = "snr_db")]
    sigma2: Option<f64>,

    /// Mean SNR at unit distance in dB, or 'inf' for the
    /// interference-limited regime.
    #[arg(long, value_name = "DB|inf")]
    snr_db: Option<String>,

    /// Interference-limited shorthand: set the noise power to zero.
    #[arg(long, conflicts_with_all = ["snr_db", "sigma2"])]
    no_noise: bool,

    /// Threshold grid in dB: 'start:step:stop' or a single value. HetNet
    /// runs add it to every tier threshold. Default -10:1:20 (hetnet: 0).
    #[arg(long, value_name = "SPEC", allow_hyphen_values = true)]
    tau_db: Option<String>,

    /// Uplink power-control fraction in [0, 1].
    #[arg(long)]
    epsilon: Option<f64>,

    /// Uplink user density (simulation); default 30x the station density.
    #[arg(long)]
    lambda_u: Option<f64>,

    /// HetNet tiers as 'lambda,power,tau(linear);...'.
    #[arg(long, value_name = "SPEC")]
    tiers: Option<String>,

    /// HetNet association rule: avg | inst.
    #[arg(long)]
    rule: Option<RuleArg>,

    /// Lognormal shadowing dB spread (downlink simulation).
    #[arg(long)]
    shadowing_db: Option<f64>,

    /// Monte Carlo trials.
    #[arg(long)]
    trials: Option<u64>,

    /// Master seed; trial i uses stream i+1.
    #[arg(long)]
    seed: Option<u64>,

    /// Interference truncation tolerance in (0, 0.1].
    #[arg(long, value_name = "DELTA")]
    delta: Option<f64>,

    /// Minimum expected stations inside the window.
    #[arg(long, value_name = "COUNT")]
    min_bs: Option<f64>,

    /// Fixed window radius (overrides automatic sizing).
    #[arg(long)]
    window_radius: Option<f64>,

    /// Max |analytic - empirical| gap for validate mode.
    #[arg(long)]
    tol: Option<f64>,

    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,

    /// csv | json
    #[arg(long, default_value = "csv")]
    format: FormatArg,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ModeArg {
    Analytic,
    Simulate,
    Validate,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum RuleArg {
    Avg,
    Inst,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct ValidateArgs {
    /// Restrict to named scenarios (repeatable). Available:
    /// dl-nonoise-a4, dl-snr10-a4, ul-full-inversion, hetnet-avg-equal-tau,
    /// hetnet-inst-tau2.
    #[arg(long)]
    only: Vec<String>,

    /// Trials per scenario.
    #[arg(long, default_value = "20000")]
    trials: u64,

    /// Write the JSON suite report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Base scenario flags.
    #[command(flatten)]
    base: ScenarioArgs,

    /// Scenario to sweep: downlink | uplink | hetnet.
    #[arg(long)]
    scenario: ScenarioArg,

    /// Parameter to vary, as key=v1,v2,... (repeatable; cartesian product).
    /// Keys: lambda, power, alpha, sigma2, snr-db, epsilon, lambda-u,
    /// shadowing-db, trials, seed.
    #[arg(long, value_name = "KEY=V1,V2,...")]
    vary: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ScenarioArg {
    Downlink,
    Uplink,
    Hetnet,
}

/// CLI failure with its exit code.
enum Failure {
    Config(String),
    Numerical(String),
    Validation,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Validation => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::GridMismatch(_) => {
                Failure::Config(e.to_string())
            }
            Error::Quadrature { .. } | Error::Simulation(_) => Failure::Numerical(e.to_string()),
        }
    }
}

fn build_config(args: &ScenarioArgs, scenario: Scenario) -> Result<RunConfig, Failure> {
    if let Some(path) = &args.config {
        // Config files are whole-run records; mixing them with parameter
        // flags would blur which value won.
        if args.lambda.is_some()
            || args.power.is_some()
            || args.alpha.is_some()
            || args.sigma2.is_some()
            || args.snr_db.is_some()
            || args.tau_db.is_some()
            || args.epsilon.is_some()
            || args.lambda_u.is_some()
            || args.tiers.is_some()
            || args.rule.is_some()
            || args.shadowing_db.is_some()
            || args.preset.is_some()
        {
            return Err(Failure::Config(
                "--config cannot be combined with parameter flags".into(),
            ));
        }
        let cfg = parse_config_file(path).map_err(Failure::Config)?;
        if cfg.scenario != scenario {
            return Err(Failure::Config(format!(
                "config scenario {:?} does not match the command",
                cfg.scenario
            )));
        }
        return Ok(cfg);
    }

    let mode = match args.mode {
        ModeArg::Analytic => Mode::Analytic,
        ModeArg::Simulate => Mode::Simulate,
        ModeArg::Validate => Mode::Validate,
    };
    let default_grid = match scenario {
        Scenario::Hetnet => GridSpec::single(0.0),
        _ => GridSpec {
            start_db: -10.0,
            step_db: 1.0,
            stop_db: 20.0,
        },
    };
    let mut cfg = RunConfig::new(scenario, mode, default_grid);
    if let Some(name) = &args.preset {
        apply_preset(name, &mut cfg).map_err(Failure::Config)?;
    }
    if let Some(v) = args.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = args.power {
        cfg.power = v;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.sigma2 {
        cfg.sigma2 = v;
    }
    if let Some(snr) = &args.snr_db {
        cfg.sigma2 = sigma2_from_snr_db(snr, cfg.power).map_err(Failure::Config)?;
    }
    if args.no_noise {
        cfg.sigma2 = 0.0;
    }
    if let Some(spec) = &args.tau_db {
        cfg.grid = GridSpec::parse(spec).map_err(Failure::Config)?;
    }
    if args.epsilon.is_some() {
        cfg.epsilon = args.epsilon;
    }
    if scenario == Scenario::Uplink && cfg.epsilon.is_none() {
        cfg.epsilon = Some(1.0);
    }
    if args.lambda_u.is_some() {
        cfg.lambda_u = args.lambda_u;
    }
    if let Some(tiers) = &args.tiers {
        cfg.tiers = Some(parse_tiers(tiers).map_err(Failure::Config)?);
    }
    if let Some(rule) = args.rule {
        cfg.rule = Some(match rule {
            RuleArg::Avg => Rule::Avg,
            RuleArg::Inst => Rule::Inst,
        });
    }
    if args.shadowing_db.is_some() {
        cfg.shadowing_db = args.shadowing_db;
    }
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.delta {
        cfg.truncation_fraction = v;
    }
    if let Some(v) = args.min_bs {
        cfg.min_expected_bs = v;
    }
    if args.window_radius.is_some() {
        cfg.window_radius = args.window_radius;
    }
    if let Some(v) = args.tol {
        cfg.tolerance = v;
    }
    cfg.validate().map_err(Failure::Config)?;
    Ok(cfg)
}

fn emit_outcome(
    outcome: &run::RunOutcome,
    format: FormatArg,
    out: Option<&PathBuf>,
) -> Result<(), Failure> {
    let text = match format {
        FormatArg::Csv => output::to_csv(outcome),
        FormatArg::Json => output::to_json(outcome),
    };
    output::emit(&text, out.map(|p| p.as_path()))
        .map_err(|e| Failure::Numerical(format!("cannot write output: {e}")))
}

fn run_scenario(args: &ScenarioArgs, scenario: Scenario) -> Result<(), Failure> {
    let cfg = build_config(args, scenario)?;
    let outcome = run::run(&cfg)?;
    emit_outcome(&outcome, args.format, args.out.as_ref())?;
    if !outcome.pass {
        eprintln!(
            "validation failed: max gap exceeded the tolerance {}",
            cfg.tolerance
        );
        return Err(Failure::Validation);
    }
    Ok(())
}

fn run_validate(args: &ValidateArgs) -> Result<(), Failure> {
    for name in &args.only {
        if !validate::SCENARIO_NAMES.contains(&name.as_str()) {
            return Err(Failure::Config(format!(
                "unknown scenario '{name}' (available: {})",
                validate::SCENARIO_NAMES.join(", ")
            )));
        }
    }
    let results = validate::run_suite(&args.only, args.trials)?;
    let mut all_pass = true;
    for r in &results {
        println!(
            "{} {}: {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
        all_pass &= r.pass;
    }
    if let Some(path) = &args.out {
        let text = serde_json::to_string_pretty(&results).expect("serializable suite report");
        std::fs::write(path, text)
            .map_err(|e| Failure::Numerical(format!("cannot write report: {e}")))?;
    }
    if !all_pass {
        return Err(Failure::Validation);
    }
    Ok(())
}

/// Apply one `key=value` override to a config. `snr-db` is resolved against
/// the (possibly overridden) power, so it is applied after the other keys.
fn apply_override(cfg: &mut RunConfig, key: &str, value: f64) -> Result<(), String> {
    match key {
        "lambda" => cfg.lambda = value,
        "power" => cfg.power = value,
        "alpha" => cfg.alpha = value,
        "sigma2" => cfg.sigma2 = value,
        "epsilon" => cfg.epsilon = Some(value),
        "lambda-u" => cfg.lambda_u = Some(value),
        "shadowing-db" => cfg.shadowing_db = Some(value),
        "trials" => cfg.trials = value as u64,
        "seed" => cfg.seed = value as u64,
        "snr-db" => {
            cfg.sigma2 = cfg.power / cellcov_core::curve::db_to_linear(value);
        }
        other => return Err(format!("unknown sweep key '{other}'")),
    }
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let scenario = match args.scenario {
        ScenarioArg::Downlink => Scenario::Downlink,
        ScenarioArg::Uplink => Scenario::Uplink,
        ScenarioArg::Hetnet => Scenario::Hetnet,
    };
    let base = build_config(&args.base, scenario)?;
    if args.vary.is_empty() {
        return Err(Failure::Config("sweep requires at least one --vary".into()));
    }
    // Parse each --vary key=v1,v2,...
    let mut axes: Vec<(String, Vec<f64>)> = Vec::new();
    for spec in &args.vary {
        let (key, values) = spec
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--vary '{spec}' must be key=v1,v2,...")))?;
        let values: Vec<f64> = values
            .split(',')
            .map(|v| {
                v.trim().parse::<f64>().map_err(|_| {
                    Failure::Config(format!("sweep value '{v}' for '{key}' is not a number"))
                })
            })
            .collect::<Result<_, _>>()?;
        if values.is_empty() {
            return Err(Failure::Config(format!("--vary '{key}' has no values")));
        }
        axes.push((key.to_string(), values));
    }

    // Cartesian product, axes in flag order; snr-db resolves last.
    let mut combos: Vec<Vec<f64>> = vec![Vec::new()];
    for (_, values) in &axes {
        let mut next = Vec::with_capacity(combos.len() * values.len());
        for combo in &combos {
            for &v in values {
                let mut c = combo.clone();
                c.push(v);
                next.push(c);
            }
        }
        combos = next;
    }

    let mut rows = String::new();
    let mut json_points = Vec::new();
    let mut wrote_header = false;
    for combo in &combos {
        let mut cfg = base.clone();
        for ((key, _), &value) in axes.iter().zip(combo.iter()) {
            if key != "snr-db" {
                apply_override(&mut cfg, key, value).map_err(Failure::Config)?;
            }
        }
        for ((key, _), &value) in axes.iter().zip(combo.iter()) {
            if key == "snr-db" {
                apply_override(&mut cfg, key, value).map_err(Failure::Config)?;
            }
        }
        cfg.validate().map_err(Failure::Config)?;
        let outcome = run::run(&cfg)?;
        match args.base.format {
            FormatArg::Csv => {
                let body = output::to_csv(&outcome);
                let mut lines = body.lines();
                let header = lines.next().unwrap_or_default();
                if !wrote_header {
                    let keys: Vec<&str> = axes.iter().map(|(k, _)| k.as_str()).collect();
                    rows.push_str(&format!("{},{header}\n", keys.join(",")));
                    wrote_header = true;
                }
                let prefix = combo
                    .iter()
                    .map(|v| format!("{v:.16e}"))
                    .collect::<Vec<_>>()
                    .join(",");
                for line in lines {
                    rows.push_str(&format!("{prefix},{line}\n"));
                }
            }
            FormatArg::Json => {
                let overrides: serde_json::Map<String, serde_json::Value> = axes
                    .iter()
                    .zip(combo.iter())
                    .map(|((k, _), &v)| (k.clone(), serde_json::json!(v)))
                    .collect();
                json_points.push(serde_json::json!({
                    "overrides": overrides,
                    "config": outcome.config,
                    "artifact": outcome.artifact,
                }));
            }
        }
    }
    let text = match args.base.format {
        FormatArg::Csv => rows,
        FormatArg::Json => serde_json::to_string_pretty(&json_points).expect("serializable sweep"),
    };
    output::emit(&text, args.base.out.as_deref())
        .map_err(|e| Failure::Numerical(format!("cannot write output: {e}")))?;
    Ok(())
}

fn main() -> ExitCode {
    // Flag misuse is a configuration error (exit 1); help/version exit 0.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Downlink(args) => run_scenario(args, Scenario::Downlink),
        Command::Uplink(args) => run_scenario(args, Scenario::Uplink),
        Command::Hetnet(args) => run_scenario(args, Scenario::Hetnet),
        Command::Validate(args) => run_validate(args),
        Command::Sweep(args) => run_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Config(msg) => eprintln!("configuration error: {msg}"),
                Failure::Numerical(msg) => eprintln!("numerical failure: {msg}"),
                Failure::Validation => {}
            }
            ExitCode::from(failure.code())
        }
    }
}
