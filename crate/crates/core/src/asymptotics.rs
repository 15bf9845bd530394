//! Closed-form large-sample covariance of the estimators and first-order
//! bias coefficients, for analytical output and as convergence oracles for
//! the exact risk engine.

use thiserror::Error;

use crate::model::TraitPrevalence;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("prevalence ({p10}, {p01}, {p11}) must be strictly interior (all four cells in (0, 1))")]
    BoundaryPrevalence { p10: f64, p01: f64, p11: f64 },
}

/// Scaled asymptotic covariance: the covariance of the estimate vector
/// `(p10, p01, p11)` is `sigma / (n k^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCovariance {
    sigma: [[f64; 3]; 3],
    k: u32,
}

impl AsymptoticCovariance {
    /// Unscaled matrix, component order `(p10, p01, p11)`.
    pub fn sigma(&self) -> [[f64; 3]; 3] {
        self.sigma
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `sigma / k^2`, the large-sample covariance of `sqrt(n) * (estimate - p)`.
    pub fn per_pool(&self) -> [[f64; 3]; 3] {
        self.scale(1.0 / (f64::from(self.k) * f64::from(self.k)))
    }

    /// `sigma / (n k^2)`, the approximate covariance of the estimate at n pools.
    pub fn scaled(&self, n: u32) -> [[f64; 3]; 3] {
        self.scale(1.0 / (f64::from(n) * f64::from(self.k) * f64::from(self.k)))
    }

    fn scale(&self, c: f64) -> [[f64; 3]; 3] {
        let mut out = self.sigma;
        for row in &mut out {
            for v in row {
                *v *= c;
            }
        }
        out
    }

    /// The six distinct entries `(s11, s21, s22, s31, s32, s33)`.
    pub fn distinct_entries(&self) -> [f64; 6] {
        [
            self.sigma[0][0],
            self.sigma[1][0],
            self.sigma[1][1],
            self.sigma[2][0],
            self.sigma[2][1],
            self.sigma[2][2],
        ]
    }
}

/// Which estimator a first-order bias expansion refers to. The MLE and the
/// restricted method of moments share one expansion; the Burrows-type
/// estimator removes the O(1/n) term entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasEstimator {
    MleRmm,
    Burrows,
}

/// Coefficients of the O(1/n) bias term per component: the expected estimate
/// is `p_i + coeff_i / n + O(1/n^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderBias {
    pub bias10: f64,
    pub bias01: f64,
    pub bias11: f64,
}

impl FirstOrderBias {
    pub fn components(&self) -> [f64; 3] {
        [self.bias10, self.bias01, self.bias11]
    }
}

fn require_interior(p: &TraitPrevalence) -> Result<(), AsymptoticsError> {
    if p.is_interior() {
        Ok(())
    } else {
        Err(AsymptoticsError::BoundaryPrevalence {
            p10: p.p10(),
            p01: p.p01(),
            p11: p.p11(),
        })
    }
}

/// Powers through exp(k log x); keeps small bases well away from underflow
/// for k up to the largest realistic group sizes.
#[inline]
fn powk(x: f64, k: u32) -> f64 {
    x.powf(f64::from(k))
}

/// The common asymptotic covariance matrix of all three estimators, assembled
/// from its lower triangle and mirrored. Requires a strictly interior `p`;
/// the entries divide by powers of `p00` and the marginal sums.
pub fn covariance_matrix(
    p: &TraitPrevalence,
    k: u32,
) -> Result<AsymptoticCovariance, AsymptoticsError> {
    require_interior(p)?;
    let (p10, p01) = (p.p10(), p.p01());
    let p00 = p.p00();
    let l10 = p00 + p10;
    let l01 = p00 + p01;
    let l10k = powk(l10, k);
    let l01k = powk(l01, k);
    let p00k = powk(p00, k);
    let cross = p00k / (l10k * l01k);

    let s11 = p10 * p10 * (1.0 / l10k - 1.0) + p00 * p00 * (1.0 / p00k - 1.0 / l10k);
    let s22 = p01 * p01 * (1.0 / l01k - 1.0) + p00 * p00 * (1.0 / p00k - 1.0 / l01k);
    let s21 = p10 * p01 * (cross - 1.0)
        + p00 * p10 * (cross - 1.0 / l10k)
        + p00 * p01 * (cross - 1.0 / l01k)
        + p00 * p00 * (cross - 1.0 / l10k - 1.0 / l01k + 1.0 / p00k);
    let s31 = p10 * p10 * (1.0 - 1.0 / l10k)
        + (p10 * p01 + p00 * p10) * (1.0 - cross)
        + p00 * p01 * (1.0 / l01k - cross)
        + p00 * p00 * (1.0 / l10k + 1.0 / l01k - cross - 1.0 / p00k);
    let s32 = p01 * p01 * (1.0 - 1.0 / l01k)
        + (p10 * p01 + p00 * p01) * (1.0 - cross)
        + p00 * p10 * (1.0 / l10k - cross)
        + p00 * p00 * (1.0 / l10k + 1.0 / l01k - cross - 1.0 / p00k);
    let s33 = p10 * p10 * (1.0 / l10k - 1.0)
        + p01 * p01 * (1.0 / l01k - 1.0)
        + 2.0 * (p10 * p01 + p00 * p10 + p00 * p01) * (cross - 1.0)
        + p00 * p00 * (2.0 * cross + 1.0 / p00k - 1.0 / l10k - 1.0 / l01k - 1.0);

    Ok(AsymptoticCovariance {
        sigma: [[s11, s21, s31], [s21, s22, s32], [s31, s32, s33]],
        k,
    })
}

/// First-order bias coefficients. For [`BiasEstimator::MleRmm`] the shared
/// expansion applies; [`BiasEstimator::Burrows`] is unbiased to this order.
pub fn first_order_bias(
    p: &TraitPrevalence,
    k: u32,
    estimator: BiasEstimator,
) -> Result<FirstOrderBias, AsymptoticsError> {
    require_interior(p)?;
    if estimator == BiasEstimator::Burrows {
        return Ok(FirstOrderBias {
            bias10: 0.0,
            bias01: 0.0,
            bias11: 0.0,
        });
    }
    let kf = f64::from(k);
    let factor = (kf - 1.0) / (2.0 * kf * kf);
    let p00 = p.p00();
    let inv_p00 = 1.0 / powk(p00, k - 1);
    let inv_l10 = 1.0 / powk(p00 + p.p10(), k - 1);
    let inv_l01 = 1.0 / powk(p00 + p.p01(), k - 1);
    Ok(FirstOrderBias {
        bias10: factor * (p.p10() + inv_p00 - inv_l10),
        bias01: factor * (p.p01() + inv_p00 - inv_l01),
        bias11: factor * (p.p11() + inv_l01 + inv_l10 - inv_p00 - 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k1_collapses_to_multinomial_covariance() {
        let p = TraitPrevalence::new(0.2, 0.3, 0.1).unwrap();
        let c = covariance_matrix(&p, 1).unwrap();
        let s = c.sigma();
        assert!((s[0][0] - 0.16).abs() < 1e-14);
        assert!((s[1][1] - 0.21).abs() < 1e-14);
        assert!((s[1][0] - -0.06).abs() < 1e-14);
        assert!((s[2][2] - 0.09).abs() < 1e-14);
        assert!((s[2][0] - -0.02).abs() < 1e-14);
        assert!((s[2][1] - -0.03).abs() < 1e-14);
    }

    #[test]
    fn matrix_is_symmetric() {
        let p = TraitPrevalence::new(0.045, 0.045, 0.005).unwrap();
        let s = covariance_matrix(&p, 10).unwrap().sigma();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s[i][j], s[j][i]);
            }
        }
    }

    #[test]
    fn boundary_point_rejected() {
        let p = TraitPrevalence::new(0.0, 0.3, 0.1).unwrap();
        assert!(covariance_matrix(&p, 2).is_err());
        assert!(first_order_bias(&p, 2, BiasEstimator::MleRmm).is_err());
    }

    #[test]
    fn bias_vanishes_at_k1_and_for_burrows() {
        let p = TraitPrevalence::new(0.2, 0.3, 0.1).unwrap();
        let b = first_order_bias(&p, 1, BiasEstimator::MleRmm).unwrap();
        assert_eq!(b.components(), [0.0, 0.0, 0.0]);
        let b = first_order_bias(&p, 17, BiasEstimator::Burrows).unwrap();
        assert_eq!(b.components(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn bias_coefficients_small_point() {
        // Direct evaluation of the expansion at k = 2.
        let p = TraitPrevalence::new(0.045, 0.045, 0.005).unwrap();
        let b = first_order_bias(&p, 2, BiasEstimator::MleRmm).unwrap();
        let p00 = 0.905;
        let expect10 = 0.125 * (0.045 + 1.0 / p00 - 1.0 / 0.95);
        assert!((b.bias10 - expect10).abs() < 1e-15);
        assert!((b.bias10 - 0.012_167_8).abs() < 1e-6);
        assert_eq!(b.bias10, b.bias01);
    }

    #[test]
    fn scaled_variants() {
        let p = TraitPrevalence::new(0.1, 0.1, 0.1).unwrap();
        let c = covariance_matrix(&p, 2).unwrap();
        let s = c.sigma();
        let pp = c.per_pool();
        let sc = c.scaled(25);
        assert!((pp[0][0] - s[0][0] / 4.0).abs() < 1e-15);
        assert!((sc[0][0] - s[0][0] / 100.0).abs() < 1e-15);
    }
}
