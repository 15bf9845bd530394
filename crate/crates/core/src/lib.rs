//! Estimation for the two-trait group testing multinomial model.
//!
//! Pools of `k` units are screened for two correlated binary traits; a pool
//! is positive for a trait iff any member unit carries it. This crate
//! provides:
//!
//! - the model layer: the pool-level parameter map `theta(p)`, its inverse,
//!   closure-region membership, and log-likelihood evaluation ([`model`]);
//! - three estimators of the unit-level prevalence vector: the global
//!   maximum-likelihood estimator (closed form where admissible, EM on the
//!   boundary otherwise), a restricted method-of-moments estimator, and a
//!   Burrows-type shrinkage estimator ([`estimators`]);
//! - closed-form large-sample covariance and first-order bias ([`asymptotics`]);
//! - exact finite-sample risk by exhaustive enumeration of the sample space,
//!   with a seeded Monte-Carlo fallback ([`risk`]).

pub mod asymptotics;
pub mod estimators;
pub mod model;
pub mod numeric;
pub mod risk;

pub use asymptotics::{covariance_matrix, first_order_bias, AsymptoticCovariance, BiasEstimator};
pub use estimators::{
    burrows, em_step, mle, mle_closed_form, nelder_mead_reference, rmm, EmConfig, EstimatePath,
    EstimateResult, EstimatorError,
};
pub use model::{
    in_closure_region, log_likelihood, p_from_theta, reduced_log_likelihood, theta_from_p,
    theta_from_p_extended, ModelError, PoolCounts, PoolDesign, ReducedPrevalence, ThetaVector,
    TraitPrevalence,
};
pub use risk::{
    boundary_probability, exact_risk, exact_risk_set, monte_carlo_risk, monte_carlo_risk_set,
    EstimatorKind, EstimatorRisks, RiskError, RiskMethod, RiskSummary,
    DEFAULT_ENUMERATION_BUDGET,
};
