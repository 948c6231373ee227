//! Uplink/downlink aggregate-interference asymmetry for urban UAV control links.
//!
//! A remote controller (RC) on the ground steers a UAV over a dense urban
//! area. Ground interferers are shared-spectrum transmitters whose local
//! density fluctuates: the densities seen at the UAV (uplink, RC-to-UAV) and
//! at the RC (downlink, UAV-to-RC) form a correlated pair modeled as a
//! bivariate log-Gaussian Cox process. Uplink interference arrives over
//! air-to-ground channels with an altitude-dependent line-of-sight
//! probability, while downlink interference is ground-to-ground and
//! non-line-of-sight, so the two directions are systematically asymmetric.
//!
//! The crate provides both sides of the analysis and cross-validates them:
//!
//! * [`intensity`] — the correlated node-density pair and its moments,
//! * [`channel`] — LoS probability models, path gain, Rayleigh fading,
//! * [`analytic`] — closed-form interference moments, the asymmetry ratio,
//!   an upper-incomplete-gamma kernel for non-positive order, and
//!   independent quadrature oracles,
//! * [`montecarlo`] — snapshot simulation of correlated UL/DL interference
//!   and the grid random-walk mobility model,
//! * [`config`] / [`sweep`] / [`validation`] — the experiment runner behind
//!   the `uavintf` command-line tool.
//!
//! All core math is generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the `*64` aliases at the crate root pin the
//! double-precision variants the CLI uses.

// Domain guards are written `!(x > 0)` so NaN fails them; `x <= 0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
pub mod config;
pub mod error;
pub mod intensity;
pub mod montecarlo;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod sweep;
pub mod units;
pub mod validation;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision aliases for the main domain types.
pub type SystemConfig64 = config::SystemConfig<f64>;
pub type LgcpParams64 = intensity::LgcpParams<f64>;
pub type IntensityPair64 = intensity::IntensityPair<f64>;
pub type LosEnvParams64 = channel::LosEnvParams<f64>;
pub type LinkBudget64 = channel::LinkBudget<f64>;
pub type MomentSet64 = analytic::MomentSet<f64>;
pub type UavState64 = montecarlo::UavState<f64>;
pub type InterferenceSample64 = montecarlo::InterferenceSample<f64>;
pub type RatioEstimate64 = montecarlo::RatioEstimate<f64>;
pub type SweepResult64 = sweep::SweepResult<f64>;
