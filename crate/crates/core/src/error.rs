//! Crate-wide error type.

use crate::numerics::QuadratureError;

/// Errors produced by analytic evaluation, sampling, and simulation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter failed validation (wrong sign, out of range, non-finite).
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A quadrature did not converge or hit a non-finite evaluation.
    /// `context` names the integral (for nested quadratures, which level failed).
    #[error("quadrature failure in {context}: {source}")]
    Quadrature {
        context: &'static str,
        source: QuadratureError,
    },

    /// A Monte Carlo run could not proceed (e.g. repeated empty windows,
    /// which signals a misconfigured intensity or window radius).
    #[error("simulation failure: {0}")]
    Simulation(String),

    /// Curves with different threshold grids were compared.
    #[error("threshold grid mismatch: {0}")]
    GridMismatch(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn quadrature(context: &'static str, source: QuadratureError) -> Self {
        Error::Quadrature { context, source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
