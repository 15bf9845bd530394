//! Exact finite-sample risk by exhaustive enumeration of the pool-count
//! sample space, with a seeded Monte-Carlo fallback for spaces beyond the
//! enumeration budget.

mod exact;
mod mc;
mod pmf;

pub use exact::{boundary_probabilities, exact_moments, EstimatorMoments, ExactSweep};
pub use mc::{MC_CHUNK, MC_RNG_ALGORITHM};
pub use pmf::{enumerate_sample_space, sample_space_size, LogPmf};

use thiserror::Error;

use crate::estimators::{EmConfig, EstimatorError};
use crate::model::{ModelError, PoolCounts, PoolDesign, TraitPrevalence};

/// Default cap on exhaustive enumeration (number of outcomes).
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 50_000_000;

/// Relative bias is reported only when the true component is at least this.
pub const REL_BIAS_MIN_P: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum RiskError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("estimator failed at counts {x:?}: {source}")]
    EmFailure {
        x: PoolCounts,
        source: EstimatorError,
    },
    #[error("enumerating {required} outcomes exceeds the budget of {budget}; use monte_carlo_risk")]
    BudgetExceeded { required: u64, budget: u64 },
    #[error("prevalence ({p10}, {p01}, {p11}) must be strictly interior for risk evaluation")]
    BoundaryPrevalence { p10: f64, p01: f64, p11: f64 },
    #[error("monte carlo requires at least one sample")]
    NoSamples,
}

/// Which estimator a risk summary refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    Mle,
    Rmm,
    Burrows,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [Self::Mle, Self::Rmm, Self::Burrows];

    pub fn index(&self) -> usize {
        match self {
            Self::Mle => 0,
            Self::Rmm => 1,
            Self::Burrows => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Mle => "mle",
            Self::Rmm => "rmm",
            Self::Burrows => "burrows",
        }
    }
}

/// How a summary was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskMethod {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// Risk of one component of the estimate vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentRisk {
    pub expectation: f64,
    pub bias: f64,
    /// `100 * bias / p_i`; absent when the true component is below
    /// [`REL_BIAS_MIN_P`].
    pub relative_bias_percent: Option<f64>,
    pub mse: f64,
}

/// Monte-Carlo standard errors for the headline fields; absent for exact
/// summaries. Averages combine componentwise errors without cross terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskStandardErrors {
    pub expectation: [f64; 3],
    pub mse: [f64; 3],
    pub relative_bias_percent: [Option<f64>; 3],
    pub avg_abs_relative_bias: Option<f64>,
    pub avg_mse: f64,
    pub boundary_probability: f64,
}

/// Exact or estimated finite-sample risk of one estimator at one prevalence.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskSummary {
    pub estimator: EstimatorKind,
    pub design: PoolDesign,
    pub true_p: TraitPrevalence,
    /// Component order (p10, p01, p11).
    pub components: [ComponentRisk; 3],
    /// Mean of |relative bias| over the three components; absent when any
    /// component suppresses its relative bias.
    pub avg_abs_relative_bias: Option<f64>,
    /// Mean of the three component MSEs.
    pub avg_mse: f64,
    /// P(x outside the closure region).
    pub boundary_probability: f64,
    pub method: RiskMethod,
    pub standard_errors: Option<RiskStandardErrors>,
}

fn summarize(
    estimator: EstimatorKind,
    design: PoolDesign,
    p: &TraitPrevalence,
    expectation: [f64; 3],
    mse: [f64; 3],
    boundary_probability: f64,
    method: RiskMethod,
    standard_errors: Option<RiskStandardErrors>,
) -> RiskSummary {
    let truth = p.components();
    let mut components = [ComponentRisk {
        expectation: 0.0,
        bias: 0.0,
        relative_bias_percent: None,
        mse: 0.0,
    }; 3];
    let mut abs_rel = Some(0.0);
    for i in 0..3 {
        let bias = expectation[i] - truth[i];
        let rel = if truth[i] >= REL_BIAS_MIN_P {
            Some(100.0 * bias / truth[i])
        } else {
            None
        };
        components[i] = ComponentRisk {
            expectation: expectation[i],
            bias,
            relative_bias_percent: rel,
            mse: mse[i],
        };
        abs_rel = match (abs_rel, rel) {
            (Some(acc), Some(r)) => Some(acc + r.abs() / 3.0),
            _ => None,
        };
    }
    RiskSummary {
        estimator,
        design,
        true_p: *p,
        components,
        avg_abs_relative_bias: abs_rel,
        avg_mse: (mse[0] + mse[1] + mse[2]) / 3.0,
        boundary_probability,
        method,
        standard_errors,
    }
}

/// Risk summaries for all three estimators at one prevalence point.
#[derive(Debug, Clone)]
pub struct EstimatorRisks {
    pub mle: RiskSummary,
    pub rmm: RiskSummary,
    pub burrows: RiskSummary,
}

impl EstimatorRisks {
    pub fn get(&self, kind: EstimatorKind) -> &RiskSummary {
        match kind {
            EstimatorKind::Mle => &self.mle,
            EstimatorKind::Rmm => &self.rmm,
            EstimatorKind::Burrows => &self.burrows,
        }
    }
}

/// Exact probability that counts fall outside the closure region.
pub fn boundary_probability(p: &TraitPrevalence, design: PoolDesign) -> Result<f64, RiskError> {
    Ok(boundary_probabilities(std::slice::from_ref(p), design)?[0])
}

/// Exact risk for every estimator at each point, sharing one enumeration.
pub fn exact_risk_set(
    points: &[TraitPrevalence],
    design: PoolDesign,
    em: &EmConfig,
    budget: u64,
) -> Result<Vec<EstimatorRisks>, RiskError> {
    let sweep = exact_moments(points, design, em, budget)?;
    Ok(points
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let make = |kind: EstimatorKind| {
                let m = &sweep.per_point[j][kind.index()];
                summarize(
                    kind,
                    design,
                    p,
                    m.expectation,
                    m.mse(),
                    sweep.boundary_probability[j],
                    RiskMethod::Exact,
                    None,
                )
            };
            EstimatorRisks {
                mle: make(EstimatorKind::Mle),
                rmm: make(EstimatorKind::Rmm),
                burrows: make(EstimatorKind::Burrows),
            }
        })
        .collect())
}

/// Exact risk of one estimator under the default enumeration budget.
pub fn exact_risk(
    p: &TraitPrevalence,
    design: PoolDesign,
    estimator: EstimatorKind,
    em: &EmConfig,
) -> Result<RiskSummary, RiskError> {
    exact_risk_with_budget(p, design, estimator, em, DEFAULT_ENUMERATION_BUDGET)
}

pub fn exact_risk_with_budget(
    p: &TraitPrevalence,
    design: PoolDesign,
    estimator: EstimatorKind,
    em: &EmConfig,
    budget: u64,
) -> Result<RiskSummary, RiskError> {
    let set = exact_risk_set(std::slice::from_ref(p), design, em, budget)?;
    Ok(set[0].get(estimator).clone())
}

/// Monte-Carlo estimates for all three estimators from one sampling pass.
pub fn monte_carlo_risk_set(
    p: &TraitPrevalence,
    design: PoolDesign,
    em: &EmConfig,
    samples: u64,
    seed: u64,
) -> Result<EstimatorRisks, RiskError> {
    let (mle_acc, [rmm_acc, b_acc]) = mc::run_monte_carlo(p, design, em, samples, seed)?;
    Ok(EstimatorRisks {
        mle: mc_summary(p, design, EstimatorKind::Mle, &mle_acc, samples, seed),
        rmm: mc_summary(p, design, EstimatorKind::Rmm, &rmm_acc, samples, seed),
        burrows: mc_summary(p, design, EstimatorKind::Burrows, &b_acc, samples, seed),
    })
}

/// Monte-Carlo estimate of the same summary from seeded multinomial draws.
/// Deterministic for a fixed seed; standard errors accompany every field.
pub fn monte_carlo_risk(
    p: &TraitPrevalence,
    design: PoolDesign,
    estimator: EstimatorKind,
    em: &EmConfig,
    samples: u64,
    seed: u64,
) -> Result<RiskSummary, RiskError> {
    let set = monte_carlo_risk_set(p, design, em, samples, seed)?;
    Ok(set.get(estimator).clone())
}

fn mc_summary(
    p: &TraitPrevalence,
    design: PoolDesign,
    estimator: EstimatorKind,
    acc: &mc::McAccumulator,
    samples: u64,
    seed: u64,
) -> RiskSummary {
    let truth = p.components();
    let s = acc.samples as f64;
    let mut expectation = [0.0; 3];
    let mut mse = [0.0; 3];
    let mut se_e = [0.0; 3];
    let mut se_mse = [0.0; 3];
    let mut se_rel = [None; 3];
    for i in 0..3 {
        let m1 = acc.e[i].value() / s;
        let m2 = acc.e2[i].value() / s;
        let q1 = acc.sq[i].value() / s;
        let q2 = acc.sq2[i].value() / s;
        expectation[i] = m1;
        mse[i] = q1;
        se_e[i] = ((m2 - m1 * m1).max(0.0) / s).sqrt();
        se_mse[i] = ((q2 - q1 * q1).max(0.0) / s).sqrt();
        if truth[i] >= REL_BIAS_MIN_P {
            se_rel[i] = Some(100.0 * se_e[i] / truth[i]);
        }
    }
    let bp = acc.boundary as f64 / s;
    let se_avg_rel = if se_rel.iter().all(|v| v.is_some()) {
        let sum: f64 = se_rel.iter().map(|v| v.unwrap().powi(2)).sum();
        Some(sum.sqrt() / 3.0)
    } else {
        None
    };
    let errors = RiskStandardErrors {
        expectation: se_e,
        mse: se_mse,
        relative_bias_percent: se_rel,
        avg_abs_relative_bias: se_avg_rel,
        avg_mse: (se_mse.iter().map(|v| v * v).sum::<f64>()).sqrt() / 3.0,
        boundary_probability: (bp * (1.0 - bp) / s).sqrt(),
    };
    summarize(
        estimator,
        design,
        p,
        expectation,
        mse,
        bp,
        RiskMethod::MonteCarlo { samples, seed },
        Some(errors),
    )
}
