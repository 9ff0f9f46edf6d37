//! Nonparametric estimation in multi-state event-history models that may
//! violate the Markov assumption, for data subject to random left-truncation
//! (delayed study entry) and right-censoring.
//!
//! The crate provides
//!
//! - a long-format data model for observed multi-state trajectories with
//!   delayed entry ([`data`], [`io`]),
//! - reduction to counting and at-risk processes ([`table`]),
//! - the multivariate Nelson-Aalen estimator, the product integral /
//!   Aalen-Johansen transform, state occupation probabilities under several
//!   initial-distribution policies, and the landmark Aalen-Johansen estimator
//!   of transition probabilities ([`hazard`], [`estimate`]),
//! - a Cox partial-likelihood check of the Markov assumption ([`cox`]),
//! - Efron and wild (multiplier) bootstrap resampling with
//!   standardized-quantile confidence intervals ([`resample`]),
//! - simulation scenario generators for illness-death models with several
//!   dependence mechanisms, truncation and censoring schemes ([`simulate`]),
//! - a replicated-experiment harness computing bias, RMSE and empirical
//!   coverage against large-sample oracles ([`experiment`]).
//!
//! Start with the runnable examples (`cargo run --example occupation`) or the
//! `multistate` command-line tool.

// Validation uses `!(x > 0.0)` so that NaN parameters are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cox;
pub mod data;
pub mod estimate;
pub mod experiment;
pub mod export;
pub mod hazard;
pub mod io;
pub mod matrix;
pub mod resample;
pub mod seeds;
pub mod simulate;
pub mod step;
pub mod table;

pub use cox::{cox_markov_check, CoxFit};
pub use data::{Dataset, ObservationRecord, Outcome, StateSpace, Subject};
pub use estimate::{
    initial_distribution, landmark_aalen_johansen, product_integral, state_occupation,
    InitialPolicy, ProbabilityCurve,
};
pub use hazard::{nelson_aalen, CumulativeHazardMatrix};
pub use resample::{
    efron_bootstrap, log_transformed_quantile_ci, standardized_quantile_ci,
    wild_bootstrap_nelson_aalen, wild_bootstrap_transition_probability, BootstrapSample,
    ConfidenceInterval, ResampleMethod,
};
pub use simulate::{
    apply_censoring, apply_truncation, sample_skew_normal, simulate_dataset, simulate_latent,
    Censoring, LatentPath, Mechanism, ScenarioConfig, Truncation,
};
pub use table::EventTable;
