//! CSV and JSON emitters. CSV schema is stable:
//! `tau_db,tau_linear,coverage[,ci_low,ci_high,trials]` with full-precision
//! (17 significant digit) values in grid order; validate runs extend it to
//! `tau_db,tau_linear,analytic,empirical,ci_low,ci_high,gap`.

use std::io::Write;
use std::path::Path;

use cellcov_core::curve::linear_to_db;

use crate::config::RunConfig;
use crate::run::{Artifact, RunOutcome};

/// 17 significant digits: round-trips any f64 exactly.
fn full(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_csv(outcome: &RunOutcome) -> String {
    let mut out = String::new();
    match &outcome.artifact {
        Artifact::Curve(curve) => {
            out.push_str("tau_db,tau_linear,coverage\n");
            for i in 0..curve.tau_linear.len() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    full(curve.tau_db[i]),
                    full(curve.tau_linear[i]),
                    full(curve.coverage[i])
                ));
            }
        }
        Artifact::Estimate(est) => {
            out.push_str("tau_db,tau_linear,coverage,ci_low,ci_high,trials\n");
            for i in 0..est.thresholds.len() {
                let lo = (est.coverage[i] - est.ci_half_width[i]).max(0.0);
                let hi = (est.coverage[i] + est.ci_half_width[i]).min(1.0);
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    full(linear_to_db(est.thresholds[i])),
                    full(est.thresholds[i]),
                    full(est.coverage[i]),
                    full(lo),
                    full(hi),
                    est.trials
                ));
            }
        }
        Artifact::Report(report) => {
            out.push_str("tau_db,tau_linear,analytic,empirical,ci_low,ci_high,gap\n");
            for i in 0..report.thresholds.len() {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    full(linear_to_db(report.thresholds[i])),
                    full(report.thresholds[i]),
                    full(report.analytic[i]),
                    full(report.empirical[i]),
                    full((report.empirical[i] - report.ci_half_width[i]).max(0.0)),
                    full((report.empirical[i] + report.ci_half_width[i]).min(1.0)),
                    full(report.gap[i])
                ));
            }
        }
    }
    out
}

pub fn to_json(outcome: &RunOutcome) -> String {
    #[derive(serde::Serialize)]
    struct Document<'a> {
        config: &'a RunConfig,
        #[serde(flatten)]
        artifact: &'a Artifact,
        pass: bool,
    }
    serde_json::to_string_pretty(&Document {
        config: &outcome.config,
        artifact: &outcome.artifact,
        pass: outcome.pass,
    })
    .expect("serializable artifact")
}

/// Write to the path, or stdout when no path is given.
pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
        }
    }
}
