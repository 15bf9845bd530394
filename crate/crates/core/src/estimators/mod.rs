//! The three prevalence estimators: the global-maximizer MLE (closed form on
//! the closure region, EM iteration on the boundary off it), the restricted
//! method-of-moments estimator, and the Burrows-type shrinkage estimator.

mod nelder_mead;

pub use nelder_mead::{nelder_mead_reference, SimplexOutcome};

use thiserror::Error;

use crate::model::{
    in_closure_region, kernel_given_theta, membership_sum, theta_from_p_extended, ModelError,
    PoolCounts, PoolDesign, ReducedPrevalence, TraitPrevalence, CLAMP_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("closed-form estimator called for counts outside the closure region (membership sum {membership_sum})")]
    OutsideClosureRegion { membership_sum: f64 },
    #[error("EM reached a degenerate state at iteration {iteration}: denominator {denominator} for observation cell {cell}")]
    DegenerateState {
        iteration: u32,
        cell: &'static str,
        denominator: f64,
    },
    #[error("EM did not converge within {max_iterations} iterations (last change {last_delta})")]
    NotConverged {
        max_iterations: u32,
        last_delta: f64,
        estimate: TraitPrevalence,
    },
    #[error("EM configuration invalid: epsilon {epsilon}, max_iterations {max_iterations}")]
    InvalidConfig { epsilon: f64, max_iterations: u32 },
}

/// EM settings: likelihood-change stopping threshold, iteration cap, and the
/// interior starting point for the reduced two-parameter problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmConfig {
    pub epsilon: f64,
    pub max_iterations: u32,
    pub initial_pstar: ReducedPrevalence,
}

impl EmConfig {
    pub fn new(
        epsilon: f64,
        max_iterations: u32,
        initial_pstar: ReducedPrevalence,
    ) -> Result<Self, EstimatorError> {
        if !(epsilon > 0.0) || max_iterations == 0 {
            return Err(EstimatorError::InvalidConfig {
                epsilon,
                max_iterations,
            });
        }
        Ok(Self {
            epsilon,
            max_iterations,
            initial_pstar,
        })
    }
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-10,
            max_iterations: 100_000,
            initial_pstar: ReducedPrevalence::new_unchecked(0.25, 0.25),
        }
    }
}

/// Which branch produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatePath {
    ClosedForm,
    EmBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub estimate: TraitPrevalence,
    pub path: EstimatePath,
    pub iterations: u32,
    /// Kernel log-likelihood at the estimate.
    pub final_log_likelihood: f64,
    /// True iff the estimate has `p11 = 0` via the EM branch.
    pub on_boundary: bool,
}

/// Clamp cancellation noise in a closed-form cell. Values more negative than
/// the knife-edge budget indicate a bug, not noise.
#[inline]
fn clamp_cell(v: f64) -> f64 {
    if v < 0.0 {
        debug_assert!(v > -CLAMP_TOL, "closed-form cell {v} below clamp budget");
        if v > -CLAMP_TOL {
            0.0
        } else {
            v
        }
    } else {
        v
    }
}

/// Plug-in maximum likelihood estimate for counts inside the closure region:
/// `p00 = (x00/n)^(1/k)`, `p10 = ((x00+x10)/n)^(1/k) - p00`, symmetrically for
/// `p01`, and `p11` as the complement.
pub fn mle_closed_form(
    x: &PoolCounts,
    design: PoolDesign,
) -> Result<TraitPrevalence, EstimatorError> {
    x.check_design(design)?;
    let m = membership_sum(x, design);
    if m > 1.0 + crate::model::MEMBERSHIP_TOL {
        return Err(EstimatorError::OutsideClosureRegion { membership_sum: m });
    }
    Ok(closed_form_unchecked(x, design))
}

/// The closed-form expressions without the membership check; shared verbatim
/// by `mle` and `rmm` so that both produce bit-equal values on the closure
/// region.
fn closed_form_unchecked(x: &PoolCounts, design: PoolDesign) -> TraitPrevalence {
    let p00 = design.root(x.x00 as f64);
    let p10 = clamp_cell(design.root((x.x00 + x.x10) as f64) - p00);
    let p01 = clamp_cell(design.root((x.x00 + x.x01) as f64) - p00);
    let p11 = clamp_cell(1.0 - p00 - p10 - p01);
    TraitPrevalence::new_unchecked(p10, p01, p11)
}

/// Intermediate quantities of one EM step at `(pstar, p11 = 0)`.
struct EmState {
    theta10: f64,
    theta01: f64,
    theta11: f64,
    a10: f64,
    a01: f64,
}

impl EmState {
    #[inline]
    fn at(p10: f64, p01: f64, k: u32) -> Self {
        let p00 = 1.0 - p10 - p01;
        let l10 = p00 + p10;
        let l01 = p00 + p01;
        let a10 = l10.powi(k as i32 - 1);
        let a01 = l01.powi(k as i32 - 1);
        let p00k = p00.powi(k as i32);
        let l10k = a10 * l10;
        let l01k = a01 * l01;
        EmState {
            theta10: l10k - p00k,
            theta01: l01k - p00k,
            theta11: 1.0 - l10k - l01k + p00k,
            a10,
            a01,
        }
    }
}

const DENOM_FLOOR: f64 = 1e-300;

#[inline]
fn em_update(
    p10: f64,
    p01: f64,
    x: &PoolCounts,
    design: PoolDesign,
    iteration: u32,
) -> Result<(f64, f64), EstimatorError> {
    let state = EmState::at(p10, p01, design.k());
    let n = design.n_f64();
    let mut next10 = 0.0;
    let mut next01 = 0.0;
    if x.x10 > 0 {
        if state.theta10 < DENOM_FLOOR {
            return Err(EstimatorError::DegenerateState {
                iteration,
                cell: "theta10",
                denominator: state.theta10,
            });
        }
        next10 += state.a10 * p10 / state.theta10 * (x.x10 as f64 / n);
    }
    if x.x01 > 0 {
        if state.theta01 < DENOM_FLOOR {
            return Err(EstimatorError::DegenerateState {
                iteration,
                cell: "theta01",
                denominator: state.theta01,
            });
        }
        next01 += state.a01 * p01 / state.theta01 * (x.x01 as f64 / n);
    }
    if x.x11 > 0 {
        if state.theta11 < DENOM_FLOOR {
            return Err(EstimatorError::DegenerateState {
                iteration,
                cell: "theta11",
                denominator: state.theta11,
            });
        }
        let w = x.x11 as f64 / n;
        next10 += (1.0 - state.a10) * p10 / state.theta11 * w;
        next01 += (1.0 - state.a01) * p01 / state.theta11 * w;
    }
    Ok((next10, next01))
}

/// Reduced-model kernel at `(p10, p01, 0)` evaluated from raw coordinates;
/// used inside the EM loop where the iterates are known to be admissible.
#[inline]
fn reduced_kernel_raw(p10: f64, p01: f64, x: &PoolCounts, k: u32) -> f64 {
    let theta = theta_from_p_extended(&TraitPrevalence::new_unchecked(p10, p01, 0.0), k);
    kernel_given_theta(&theta, x)
}

/// One EM update of the reduced two-parameter problem. Requires a strictly
/// interior state; counts must come from outside the closure region, which
/// guarantees `x10 > 0` and `x01 > 0`.
pub fn em_step(
    pstar: &ReducedPrevalence,
    x: &PoolCounts,
    design: PoolDesign,
) -> Result<ReducedPrevalence, EstimatorError> {
    x.check_design(design)?;
    let (p10, p01) = em_update(pstar.p10(), pstar.p01(), x, design, 0)?;
    Ok(ReducedPrevalence::new_unchecked(p10, p01))
}

/// Global maximizer of the kernel likelihood over the closed parameter space.
///
/// Counts inside the closure region take the closed form; all others iterate
/// EM on the two-parameter boundary model from `config.initial_pstar` until
/// the kernel change drops below `config.epsilon`.
pub fn mle(
    x: &PoolCounts,
    design: PoolDesign,
    config: &EmConfig,
) -> Result<EstimateResult, EstimatorError> {
    x.check_design(design)?;
    if in_closure_region(x, design) {
        let estimate = closed_form_unchecked(x, design);
        let theta = theta_from_p_extended(&estimate, design.k());
        return Ok(EstimateResult {
            estimate,
            path: EstimatePath::ClosedForm,
            iterations: 0,
            final_log_likelihood: kernel_given_theta(&theta, x),
            on_boundary: false,
        });
    }
    let (mut p10, mut p01) = (config.initial_pstar.p10(), config.initial_pstar.p01());
    let mut ll = reduced_kernel_raw(p10, p01, x, design.k());
    let mut last_delta = f64::INFINITY;
    for iteration in 1..=config.max_iterations {
        let (n10, n01) = em_update(p10, p01, x, design, iteration)?;
        p10 = n10;
        p01 = n01;
        let ll_next = reduced_kernel_raw(p10, p01, x, design.k());
        last_delta = (ll_next - ll).abs();
        ll = ll_next;
        if last_delta < config.epsilon {
            return Ok(EstimateResult {
                estimate: TraitPrevalence::new_unchecked(p10, p01, 0.0),
                path: EstimatePath::EmBoundary,
                iterations: iteration,
                final_log_likelihood: ll,
                on_boundary: true,
            });
        }
    }
    Err(EstimatorError::NotConverged {
        max_iterations: config.max_iterations,
        last_delta,
        estimate: TraitPrevalence::new_unchecked(p10, p01, 0.0),
    })
}

/// Restricted method-of-moments estimator: the plug-in estimate with `p11`
/// truncated at zero. Coincides with the closed-form MLE on the closure
/// region (identical floating expressions).
pub fn rmm(x: &PoolCounts, design: PoolDesign) -> Result<TraitPrevalence, EstimatorError> {
    x.check_design(design)?;
    if in_closure_region(x, design) {
        return Ok(closed_form_unchecked(x, design));
    }
    let t1 = design.root((x.x00 + x.x10) as f64);
    let t2 = design.root((x.x00 + x.x01) as f64);
    let p10 = 1.0 - t2;
    let p01 = 1.0 - t1;
    Ok(TraitPrevalence::new_unchecked(p10, p01, 0.0))
}

/// Burrows-type shrinkage estimator: replaces each root `(c/n)^(1/k)` with
/// `((c + eta)/(n + eta))^(1/k)` where `eta = (k-1)/(2k)`, removing the
/// O(1/n) bias term; `p11` is zeroed outside the closure region.
pub fn burrows(x: &PoolCounts, design: PoolDesign) -> Result<TraitPrevalence, EstimatorError> {
    x.check_design(design)?;
    let k = f64::from(design.k());
    let eta = (k - 1.0) / (2.0 * k);
    let n_eta = design.n_f64() + eta;
    let shrunk = |c: f64| ((c + eta) / n_eta).powf(1.0 / k);
    let g1 = shrunk((x.x00 + x.x10) as f64);
    let g2 = shrunk((x.x00 + x.x01) as f64);
    let g3 = shrunk(x.x00 as f64);
    let p11 = if in_closure_region(x, design) {
        clamp_cell(1.0 - g1 - g2 + g3)
    } else {
        0.0
    };
    let p10 = clamp_cell(1.0 - g2 - p11);
    let p01 = clamp_cell(1.0 - g1 - p11);
    Ok(TraitPrevalence::new_unchecked(p10, p01, p11))
}
