//! Exhaustive-enumeration sweep: evaluates all three estimators on every
//! count vector and accumulates probability-weighted moments for one or more
//! prevalence points in a single pass.
//!
//! Parallelism is over `x00` rows. Each row folds into its own compensated
//! accumulators and the per-row partials are merged in row order, so results
//! are bit-stable across thread counts.

use rayon::prelude::*;

use crate::estimators::{burrows, mle, rmm, EmConfig};
use crate::model::{in_closure_region, PoolCounts, PoolDesign, TraitPrevalence};
use crate::numeric::CompensatedSum;

use super::pmf::LogPmf;
use super::RiskError;

/// Probability-weighted first and centered second moments of one estimator.
#[derive(Debug, Clone, Copy)]
pub struct EstimatorMoments {
    /// E[p̂] componentwise, order (p10, p01, p11).
    pub expectation: [f64; 3],
    /// E[(p̂ - p)(p̂ - p)'] about the true point.
    pub centered_second: [[f64; 3]; 3],
}

impl EstimatorMoments {
    pub fn bias(&self, p: &TraitPrevalence) -> [f64; 3] {
        let t = p.components();
        [
            self.expectation[0] - t[0],
            self.expectation[1] - t[1],
            self.expectation[2] - t[2],
        ]
    }

    /// Diagonal of the centered second moment.
    pub fn mse(&self) -> [f64; 3] {
        [
            self.centered_second[0][0],
            self.centered_second[1][1],
            self.centered_second[2][2],
        ]
    }

    pub fn covariance(&self, p: &TraitPrevalence) -> [[f64; 3]; 3] {
        let b = self.bias(p);
        let mut out = self.centered_second;
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] -= b[i] * b[j];
            }
        }
        out
    }
}

/// Result of one exact sweep over the whole sample space.
#[derive(Debug, Clone)]
pub struct ExactSweep {
    pub design: PoolDesign,
    pub points: Vec<TraitPrevalence>,
    /// Total enumerated probability mass per point (should be 1 up to rounding).
    pub mass: Vec<f64>,
    /// P(x outside the closure region) per point.
    pub boundary_probability: Vec<f64>,
    /// Moments per point, estimator order (Mle, Rmm, Burrows).
    pub per_point: Vec<[EstimatorMoments; 3]>,
    pub outcomes: u64,
}

const N_SUMS: usize = 9;

/// Per-(point, estimator) running sums: 3 expectations, 3 squared errors,
/// 3 cross products of errors ((0,1), (0,2), (1,2)).
#[derive(Clone)]
struct EstAcc {
    sums: [CompensatedSum; N_SUMS],
}

impl EstAcc {
    fn new() -> Self {
        Self {
            sums: [CompensatedSum::new(); N_SUMS],
        }
    }

    #[inline]
    fn add(&mut self, w: f64, est: &[f64; 3], truth: &[f64; 3]) {
        let d = [est[0] - truth[0], est[1] - truth[1], est[2] - truth[2]];
        self.sums[0].add(w * est[0]);
        self.sums[1].add(w * est[1]);
        self.sums[2].add(w * est[2]);
        self.sums[3].add(w * d[0] * d[0]);
        self.sums[4].add(w * d[1] * d[1]);
        self.sums[5].add(w * d[2] * d[2]);
        self.sums[6].add(w * d[0] * d[1]);
        self.sums[7].add(w * d[0] * d[2]);
        self.sums[8].add(w * d[1] * d[2]);
    }

    fn merge(&mut self, other: &EstAcc) {
        for (a, b) in self.sums.iter_mut().zip(other.sums.iter()) {
            a.merge(b);
        }
    }

    fn moments(&self) -> EstimatorMoments {
        let v: Vec<f64> = self.sums.iter().map(|s| s.value()).collect();
        EstimatorMoments {
            expectation: [v[0], v[1], v[2]],
            centered_second: [
                [v[3], v[6], v[7]],
                [v[6], v[4], v[8]],
                [v[7], v[8], v[5]],
            ],
        }
    }
}

#[derive(Clone)]
struct RowAcc {
    mass: Vec<CompensatedSum>,
    boundary: Vec<CompensatedSum>,
    ests: Vec<[EstAcc; 3]>,
}

impl RowAcc {
    fn new(points: usize) -> Self {
        Self {
            mass: vec![CompensatedSum::new(); points],
            boundary: vec![CompensatedSum::new(); points],
            ests: (0..points)
                .map(|_| [EstAcc::new(), EstAcc::new(), EstAcc::new()])
                .collect(),
        }
    }

    fn merge(&mut self, other: &RowAcc) {
        for (a, b) in self.mass.iter_mut().zip(other.mass.iter()) {
            a.merge(b);
        }
        for (a, b) in self.boundary.iter_mut().zip(other.boundary.iter()) {
            a.merge(b);
        }
        for (a, b) in self.ests.iter_mut().zip(other.ests.iter()) {
            for (x, y) in a.iter_mut().zip(b.iter()) {
                x.merge(y);
            }
        }
    }
}

fn validate_points(points: &[TraitPrevalence]) -> Result<(), RiskError> {
    for p in points {
        if !p.is_interior() {
            return Err(RiskError::BoundaryPrevalence {
                p10: p.p10(),
                p01: p.p01(),
                p11: p.p11(),
            });
        }
    }
    Ok(())
}

/// Exact moments of all three estimators at each prevalence point.
pub fn exact_moments(
    points: &[TraitPrevalence],
    design: PoolDesign,
    em: &EmConfig,
    budget: u64,
) -> Result<ExactSweep, RiskError> {
    validate_points(points)?;
    let required = super::pmf::sample_space_size(design.n());
    if required > budget {
        return Err(RiskError::BudgetExceeded { required, budget });
    }
    let pmfs: Vec<LogPmf> = points
        .iter()
        .map(|p| LogPmf::new(p, design))
        .collect::<Result<_, _>>()?;
    let truths: Vec<[f64; 3]> = points.iter().map(|p| p.components()).collect();
    let n = u64::from(design.n());

    let rows: Vec<RowAcc> = (0..=n)
        .into_par_iter()
        .map(|x00| -> Result<RowAcc, RiskError> {
            let mut acc = RowAcc::new(points.len());
            let mut weights = vec![0.0; points.len()];
            for x10 in 0..=n - x00 {
                for x01 in 0..=n - x00 - x10 {
                    let x = PoolCounts::new(x00, x10, x01, n - x00 - x10 - x01);
                    let mut any = false;
                    for (w, pmf) in weights.iter_mut().zip(pmfs.iter()) {
                        *w = pmf.weight(&x);
                        any |= *w > 0.0;
                    }
                    if !any {
                        // Zero probability at every point: nothing to accumulate.
                        continue;
                    }
                    let off = !in_closure_region(&x, design);
                    let estimates = evaluate_estimators(&x, design, em)?;
                    for (j, &w) in weights.iter().enumerate() {
                        if w == 0.0 {
                            continue;
                        }
                        acc.mass[j].add(w);
                        if off {
                            acc.boundary[j].add(w);
                        }
                        for (e, est) in acc.ests[j].iter_mut().zip(estimates.iter()) {
                            e.add(w, est, &truths[j]);
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut total = RowAcc::new(points.len());
    for row in &rows {
        total.merge(row);
    }

    Ok(ExactSweep {
        design,
        points: points.to_vec(),
        mass: total.mass.iter().map(|s| s.value()).collect(),
        boundary_probability: total.boundary.iter().map(|s| s.value()).collect(),
        per_point: total
            .ests
            .iter()
            .map(|e| [e[0].moments(), e[1].moments(), e[2].moments()])
            .collect(),
        outcomes: required,
    })
}

/// All three estimates for one count vector, order (Mle, Rmm, Burrows).
pub(crate) fn evaluate_estimators(
    x: &PoolCounts,
    design: PoolDesign,
    em: &EmConfig,
) -> Result<[[f64; 3]; 3], RiskError> {
    let m = mle(x, design, em).map_err(|source| RiskError::EmFailure { x: *x, source })?;
    let r = rmm(x, design).map_err(|source| RiskError::EmFailure { x: *x, source })?;
    let b = burrows(x, design).map_err(|source| RiskError::EmFailure { x: *x, source })?;
    Ok([
        m.estimate.components(),
        r.components(),
        b.components(),
    ])
}

/// Exact probability that the counts fall outside the closure region, for
/// several prevalence points in one pass. Enumeration only touches the pmf
/// tables, so this stays fast even at the largest pool counts.
pub fn boundary_probabilities(
    points: &[TraitPrevalence],
    design: PoolDesign,
) -> Result<Vec<f64>, RiskError> {
    validate_points(points)?;
    let pmfs: Vec<LogPmf> = points
        .iter()
        .map(|p| LogPmf::new(p, design))
        .collect::<Result<_, _>>()?;
    let n = u64::from(design.n());
    let nf = design.n_f64();
    let inv_k = 1.0 / f64::from(design.k());
    // (s/n)^(1/k) for integer s; same expression as PoolDesign::root.
    let roots: Vec<f64> = (0..=n).map(|s| (s as f64 / nf).powf(inv_k)).collect();
    let limit = 1.0 + crate::model::MEMBERSHIP_TOL;

    let rows: Vec<Vec<CompensatedSum>> = (0..=n)
        .into_par_iter()
        .map(|x00| {
            let mut acc = vec![CompensatedSum::new(); points.len()];
            let r0 = roots[x00 as usize];
            for x10 in 0..=n - x00 {
                let r1 = roots[(x00 + x10) as usize];
                for x01 in 0..=n - x00 - x10 {
                    if r1 + roots[(x00 + x01) as usize] - r0 <= limit {
                        continue;
                    }
                    let x = PoolCounts::new(x00, x10, x01, n - x00 - x10 - x01);
                    for (a, pmf) in acc.iter_mut().zip(pmfs.iter()) {
                        a.add(pmf.weight(&x));
                    }
                }
            }
            acc
        })
        .collect();

    let mut totals = vec![CompensatedSum::new(); points.len()];
    for row in &rows {
        for (t, r) in totals.iter_mut().zip(row.iter()) {
            t.merge(r);
        }
    }
    Ok(totals.iter().map(|t| t.value()).collect())
}
