//! Numerical toolkit for one-dimensional probability distributions.
//!
//! The crate models mixed laws (atoms plus an absolutely continuous part),
//! computes the classical distances between them (Lévy, Kolmogorov,
//! Kantorovich `W₁`, total variation), the entropic distance to the matched
//! normal law, Gaussian regularization `X_σ = X + σZ`, and truncation
//! functionals. On top of that sits a catalogue of stability inequalities
//! relating those quantities, together with a harness that verifies the
//! catalogue over configurable distribution families and estimates the
//! empirical constants of bounds stated with an unspecified constant.
//!
//! Modules mirror the layering:
//!
//! - [`numerics`]: normal special functions, adaptive quadrature, bisection
//! - [`distributions`]: the [`Distribution`] data model and its operations
//! - [`metrics`]: the four classical metrics, `D(X)`, `Δ(X)`, `Ent_μ(f)`
//! - [`regularize`]: Gaussian smoothing and regularized density gaps
//! - [`bounds`]: the inequality catalogue and its evaluator
//! - [`harness`]: family generators, suite runner, constant estimation

#![forbid(unsafe_code)]

use thiserror::Error;

pub mod bounds;
pub mod distributions;
pub mod harness;
pub mod metrics;
pub mod numerics;
pub mod regularize;

pub use distributions::{
    Distribution, GaussianMixtureDensity, GridDensity, MomentSummary, TruncationSummary,
};
pub use metrics::{EntropicValue, Method, MetricValue};
pub use numerics::Tolerances;
pub use regularize::RegularizationParams;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("bracket error: g({lo}) and g({hi}) do not have opposite signs")]
    Bracket { lo: f64, hi: f64 },

    #[error("quadrature did not converge (partial value {partial}, error estimate {err_estimate})")]
    QuadratureNonConvergence { partial: f64, err_estimate: f64 },

    #[error("precondition unmet for bound {bound_id}: {requirement}")]
    PreconditionUnmet {
        bound_id: String,
        requirement: String,
    },

    #[error("unknown bound id {id}; valid ids: {valid}")]
    UnknownBound { id: String, valid: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
