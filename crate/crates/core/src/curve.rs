//! Threshold grids and analytic coverage curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Build an inclusive dB grid `start, start+step, ..., stop`. A single-point
/// grid (`start == stop`) is allowed.
pub fn db_grid(start_db: f64, step_db: f64, stop_db: f64) -> Result<Vec<f64>> {
    if !start_db.is_finite() || !stop_db.is_finite() || !step_db.is_finite() {
        return Err(Error::invalid(
            "grid",
            "grid endpoints and step must be finite",
        ));
    }
    if start_db == stop_db {
        return Ok(vec![start_db]);
    }
    if step_db <= 0.0 {
        return Err(Error::invalid(
            "grid",
            format!("step must be > 0, got {step_db}"),
        ));
    }
    if start_db > stop_db {
        return Err(Error::invalid(
            "grid",
            format!("grid start {start_db} exceeds stop {stop_db}"),
        ));
    }
    let n = ((stop_db - start_db) / step_db).round() as usize;
    let mut grid = Vec::with_capacity(n + 1);
    let mut value = start_db;
    let mut i = 0usize;
    while value <= stop_db + 1e-9 * step_db {
        grid.push(value.min(stop_db));
        i += 1;
        value = start_db + i as f64 * step_db;
    }
    Ok(grid)
}

/// An analytic coverage curve over an ordered threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    /// Thresholds in dB.
    pub tau_db: Vec<f64>,
    /// The same thresholds, linear.
    pub tau_linear: Vec<f64>,
    /// Coverage probability per threshold.
    pub coverage: Vec<f64>,
}

impl CoverageCurve {
    /// Evaluate `f` on a linear threshold grid.
    pub fn from_linear_grid(
        grid: &[f64],
        mut f: impl FnMut(f64) -> Result<f64>,
    ) -> Result<CoverageCurve> {
        validate_linear_grid(grid)?;
        let mut coverage = Vec::with_capacity(grid.len());
        for &tau in grid {
            coverage.push(f(tau)?);
        }
        Ok(CoverageCurve {
            tau_db: grid.iter().map(|&t| linear_to_db(t)).collect(),
            tau_linear: grid.to_vec(),
            coverage,
        })
    }

    pub fn len(&self) -> usize {
        self.tau_linear.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau_linear.is_empty()
    }
}

pub(crate) fn validate_linear_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "threshold grid must be non-empty"));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid[0] <= 0.0 {
        return Err(Error::invalid(
            "grid",
            "thresholds must be finite and positive",
        ));
    }
    for pair in grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::invalid(
                "grid",
                "threshold grid must be strictly increasing",
            ));
        }
    }
    Ok(())
}
