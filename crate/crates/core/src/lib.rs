//! Laplace noise calibration for pufferfish privacy on summation queries.
//!
//! Users hold random values `D_i` drawn from known discrete laws and may be
//! absent. A release `Y = Σ D_i + Laplace(θ)` must keep the likelihood ratio
//! between the two events of every secret pair within `[e^{-ε}, e^{ε}]`.
//! This crate computes the smallest θ for that, per secret-pair family,
//! and checks any θ exactly.
//!
//! * [`dist`]: discrete laws, convolution, user configs and secret pairs.
//! * [`transport`]: 1-D optimal transport plans and their largest displacement.
//! * [`calibrate`]: the calibrators.
//! * [`mechanism`]: sampling and the density of the released value.
//! * [`verify`]: exact worst-case log-likelihood ratio.
//! * [`ingest`]: conditional distributions from CSV tables.

pub mod brent;
pub mod calibrate;
pub mod dist;
pub mod error;
pub mod exec;
pub mod ingest;
pub mod mechanism;
pub mod transport;
pub mod verify;

pub use calibrate::{CalibrationResult, Method, PrivacyBudget};
pub use dist::{
    background_sum, conditional_prior, convolve, DiscreteDistribution, SecretArm, SecretPair,
    SystemConfig, UserId, UserSpec,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use mechanism::{LaplaceMixture, LaplaceNoise};
pub use transport::{delta_star, kantorovich_plan, max_plan_distance, TransportPlan};
pub use verify::{verify_pair, worst_case_log_ratio, VerificationReport};
