//! SINR coverage probability for Poisson cellular networks.
//!
//! Analytic engines for the three baseline scenarios — single-tier downlink,
//! uplink with fractional power control, and the k-tier heterogeneous
//! downlink — built on a shared quadrature and special-function core, plus a
//! Monte Carlo simulator that generates every scenario from first principles
//! so each closed form and theorem can be validated against an independent
//! ground truth.
//!
//! Conventions:
//! - thresholds, powers, and noise are linear; dB conversion is the caller's
//!   job (the CLI does it exactly once at the flag boundary);
//! - units are self-consistent: densities are per squared length in the unit
//!   that makes the unit-distance power reference hold;
//! - everything that consumes randomness takes a seed and is bit-reproducible,
//!   including under parallel execution.

pub mod curve;
pub mod downlink;
mod error;
pub mod hetnet;
pub mod numerics;
pub mod point_process;
pub mod sim;
pub mod uplink;

pub use curve::CoverageCurve;
pub use error::{Error, Result};
pub use sim::{CoverageEstimate, SimConfig, ValidationReport};
