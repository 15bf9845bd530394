//! Domain types for the two-trait pooled-testing multinomial model, the
//! pool-level parameter map and its inverse, closure-region membership,
//! and log-likelihood evaluation.
//!
//! Each unit carries two correlated binary traits, encoded as the
//! three-cell prevalence vector `p = (p10, p01, p11)` with
//! `p00 = 1 - p10 - p01 - p11`. A pool of `k` units tests positive for a
//! trait iff any member unit carries it, which induces the pool-level
//! multinomial parameter `theta(p)`.

use thiserror::Error;

use crate::numeric::ln_multinomial_coefficient;

/// Slack applied when comparing the closure-membership sum against 1, so that
/// floating error cannot flip count vectors sitting exactly on the knife edge.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Cells of closed-form estimates more negative than this are treated as real
/// errors rather than cancellation noise; smaller magnitudes clamp to zero.
/// Wide enough to cover knife-edge inputs admitted by [`MEMBERSHIP_TOL`].
pub(crate) const CLAMP_TOL: f64 = 2e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("prevalence ({p10}, {p01}, {p11}) lies outside the closed parameter space")]
    InvalidPrevalence { p10: f64, p01: f64, p11: f64 },
    #[error("theta ({theta10}, {theta01}, {theta11}) lies outside the simplex")]
    InvalidTheta {
        theta10: f64,
        theta01: f64,
        theta11: f64,
    },
    #[error("reduced prevalence ({p10}, {p01}) is not {0}", if *.strict { "strictly interior" } else { "inside the closed simplex" })]
    InvalidReduced { p10: f64, p01: f64, strict: bool },
    #[error("group size and pool count must both be at least 1 (k = {k}, n = {n})")]
    InvalidDesign { k: u32, n: u32 },
    #[error("pool counts sum to {total} but the design expects n = {n}")]
    CountMismatch { total: u64, n: u32 },
}

/// Unit-level prevalence vector `(p10, p01, p11)`.
///
/// [`TraitPrevalence::new`] admits the closure of the parameter space (cells
/// may be zero). Values outside the space are occasionally useful as
/// diagnostics -- the inverse map can produce a negative `p11` -- and can be
/// built with [`TraitPrevalence::new_unchecked`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraitPrevalence {
    p10: f64,
    p01: f64,
    p11: f64,
}

impl TraitPrevalence {
    pub fn new(p10: f64, p01: f64, p11: f64) -> Result<Self, ModelError> {
        let p = Self { p10, p01, p11 };
        if p.in_closure() {
            Ok(p)
        } else {
            Err(ModelError::InvalidPrevalence { p10, p01, p11 })
        }
    }

    /// Builds the vector without any admissibility check.
    pub const fn new_unchecked(p10: f64, p01: f64, p11: f64) -> Self {
        Self { p10, p01, p11 }
    }

    pub fn p10(&self) -> f64 {
        self.p10
    }

    pub fn p01(&self) -> f64 {
        self.p01
    }

    pub fn p11(&self) -> f64 {
        self.p11
    }

    /// Derived double-negative cell `1 - p10 - p01 - p11`.
    pub fn p00(&self) -> f64 {
        1.0 - self.p10 - self.p01 - self.p11
    }

    pub fn components(&self) -> [f64; 3] {
        [self.p10, self.p01, self.p11]
    }

    /// Membership in the closed parameter space. The cell sum may exceed 1 by
    /// at most [`MEMBERSHIP_TOL`], matching what clamped closed-form
    /// estimates at knife-edge count vectors can produce.
    pub fn in_closure(&self) -> bool {
        self.p10 >= 0.0
            && self.p01 >= 0.0
            && self.p11 >= 0.0
            && self.p10 + self.p01 + self.p11 <= 1.0 + MEMBERSHIP_TOL
            && self.p10.is_finite()
            && self.p01.is_finite()
            && self.p11.is_finite()
    }

    /// Strict interior: all four cells in (0, 1).
    pub fn is_interior(&self) -> bool {
        let p00 = self.p00();
        self.p10 > 0.0
            && self.p01 > 0.0
            && self.p11 > 0.0
            && p00 > 0.0
            && self.p10 < 1.0
            && self.p01 < 1.0
            && self.p11 < 1.0
            && p00 < 1.0
    }
}

/// Pool design: group size `k` and number of pools `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolDesign {
    k: u32,
    n: u32,
}

impl PoolDesign {
    pub fn new(k: u32, n: u32) -> Result<Self, ModelError> {
        if k == 0 || n == 0 {
            return Err(ModelError::InvalidDesign { k, n });
        }
        Ok(Self { k, n })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub(crate) fn n_f64(&self) -> f64 {
        f64::from(self.n)
    }

    /// `(s / n)^(1/k)`, the building block of closure membership and the
    /// closed-form estimators. Every code path evaluates roots through this
    /// single expression so that equal inputs produce bit-equal outputs.
    #[inline]
    pub fn root(&self, s: f64) -> f64 {
        (s / self.n_f64()).powf(1.0 / f64::from(self.k))
    }
}

/// Pool-level multinomial parameter `(theta10, theta01, theta11)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaVector {
    theta10: f64,
    theta01: f64,
    theta11: f64,
}

impl ThetaVector {
    pub fn new(theta10: f64, theta01: f64, theta11: f64) -> Result<Self, ModelError> {
        let ok = theta10 >= 0.0
            && theta01 >= 0.0
            && theta11 >= 0.0
            && theta10 + theta01 + theta11 <= 1.0 + MEMBERSHIP_TOL;
        if ok {
            Ok(Self {
                theta10,
                theta01,
                theta11,
            })
        } else {
            Err(ModelError::InvalidTheta {
                theta10,
                theta01,
                theta11,
            })
        }
    }

    pub const fn new_unchecked(theta10: f64, theta01: f64, theta11: f64) -> Self {
        Self {
            theta10,
            theta01,
            theta11,
        }
    }

    pub fn theta10(&self) -> f64 {
        self.theta10
    }

    pub fn theta01(&self) -> f64 {
        self.theta01
    }

    pub fn theta11(&self) -> f64 {
        self.theta11
    }

    pub fn theta00(&self) -> f64 {
        1.0 - self.theta10 - self.theta01 - self.theta11
    }

    /// Cells in observation order `(theta00, theta10, theta01, theta11)`.
    pub fn cells(&self) -> [f64; 4] {
        [self.theta00(), self.theta10, self.theta01, self.theta11]
    }
}

/// Observed pool-level counts `(x00, x10, x01, x11)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PoolCounts {
    pub x00: u64,
    pub x10: u64,
    pub x01: u64,
    pub x11: u64,
}

impl PoolCounts {
    pub const fn new(x00: u64, x10: u64, x01: u64, x11: u64) -> Self {
        Self { x00, x10, x01, x11 }
    }

    pub fn total(&self) -> u64 {
        self.x00 + self.x10 + self.x01 + self.x11
    }

    pub fn cells(&self) -> [u64; 4] {
        [self.x00, self.x10, self.x01, self.x11]
    }

    /// All cells strictly between 0 and the total.
    pub fn is_interior(&self) -> bool {
        self.cells().iter().all(|&c| c > 0)
    }

    pub(crate) fn check_design(&self, design: PoolDesign) -> Result<(), ModelError> {
        if self.total() != u64::from(design.n()) {
            return Err(ModelError::CountMismatch {
                total: self.total(),
                n: design.n(),
            });
        }
        Ok(())
    }
}

/// Two-parameter prevalence `(p10, p01)` for the boundary model with `p11 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedPrevalence {
    p10: f64,
    p01: f64,
}

impl ReducedPrevalence {
    /// Strictly interior point of the reduced simplex.
    pub fn new(p10: f64, p01: f64) -> Result<Self, ModelError> {
        if p10 > 0.0 && p01 > 0.0 && p10 + p01 < 1.0 {
            Ok(Self { p10, p01 })
        } else {
            Err(ModelError::InvalidReduced {
                p10,
                p01,
                strict: true,
            })
        }
    }

    /// Point of the closed reduced simplex (cells may be 0, sum may be 1).
    pub fn new_closed(p10: f64, p01: f64) -> Result<Self, ModelError> {
        if p10 >= 0.0 && p01 >= 0.0 && p10 + p01 <= 1.0 {
            Ok(Self { p10, p01 })
        } else {
            Err(ModelError::InvalidReduced {
                p10,
                p01,
                strict: false,
            })
        }
    }

    pub(crate) const fn new_unchecked(p10: f64, p01: f64) -> Self {
        Self { p10, p01 }
    }

    pub fn p10(&self) -> f64 {
        self.p10
    }

    pub fn p01(&self) -> f64 {
        self.p01
    }

    /// Embeds into the full space with `p11 = 0`.
    pub fn lift(&self) -> TraitPrevalence {
        TraitPrevalence::new_unchecked(self.p10, self.p01, 0.0)
    }
}

#[inline]
fn powk(base: f64, k: u32) -> f64 {
    base.powi(k as i32)
}

fn theta_cells_raw(p: &TraitPrevalence, k: u32) -> (f64, f64, f64) {
    let p00 = p.p00();
    let l10 = p00 + p.p10();
    let l01 = p00 + p.p01();
    let p00k = powk(p00, k);
    let t10 = powk(l10, k) - p00k;
    let t01 = powk(l01, k) - p00k;
    let t11 = 1.0 - powk(l10, k) - powk(l01, k) + p00k;
    (t10, t01, t11)
}

/// Clamp cancellation noise in theta cells: magnitudes below 1e-15 go to 0.
#[inline]
fn clamp_theta(t: f64) -> f64 {
    if t < 0.0 && t > -1e-15 {
        0.0
    } else {
        t
    }
}

/// Forward map from unit-level prevalence to the pool-level parameter.
///
/// Validates that `p` lies in the closed parameter space; use
/// [`theta_from_p_extended`] to evaluate the bare algebraic map outside it.
pub fn theta_from_p(p: &TraitPrevalence, k: u32) -> Result<ThetaVector, ModelError> {
    if !p.in_closure() {
        return Err(ModelError::InvalidPrevalence {
            p10: p.p10(),
            p01: p.p01(),
            p11: p.p11(),
        });
    }
    Ok(theta_from_p_extended(p, k))
}

/// The algebraic forward map with no admissibility check on `p`.
///
/// For `p` inside the closed space the output cells are clamped into [0, 1]
/// against cancellation noise; for diagnostic inputs outside the space the
/// raw algebraic values are returned.
pub fn theta_from_p_extended(p: &TraitPrevalence, k: u32) -> ThetaVector {
    let (t10, t01, t11) = theta_cells_raw(p, k);
    if p.in_closure() {
        ThetaVector::new_unchecked(clamp_theta(t10), clamp_theta(t01), clamp_theta(t11))
    } else {
        ThetaVector::new_unchecked(t10, t01, t11)
    }
}

/// Inverse map from the pool-level parameter back to unit-level prevalence.
///
/// The result can lie outside the parameter space (negative `p11`); the
/// caller decides admissibility via [`TraitPrevalence::in_closure`].
pub fn p_from_theta(theta: &ThetaVector, k: u32) -> Result<TraitPrevalence, ModelError> {
    let (t10, t01, t11) = (theta.theta10(), theta.theta01(), theta.theta11());
    if !(t10 >= 0.0 && t01 >= 0.0 && t11 >= 0.0 && t10 + t01 + t11 <= 1.0 + MEMBERSHIP_TOL) {
        return Err(ModelError::InvalidTheta {
            theta10: t10,
            theta01: t01,
            theta11: t11,
        });
    }
    let inv_k = 1.0 / f64::from(k);
    // Subtract the largest cells first: near the simplex corner the
    // complements are tiny and the naive left-to-right order loses them.
    let p00 = one_minus3(t10, t01, t11).max(0.0).powf(inv_k);
    let p10 = one_minus2(t01, t11).powf(inv_k) - p00;
    let p01 = one_minus2(t10, t11).powf(inv_k) - p00;
    let p11 = 1.0 - p00 - p10 - p01;
    Ok(TraitPrevalence::new_unchecked(p10, p01, p11))
}

#[inline]
fn one_minus2(a: f64, b: f64) -> f64 {
    if a >= b {
        (1.0 - a) - b
    } else {
        (1.0 - b) - a
    }
}

#[inline]
fn one_minus3(a: f64, b: f64, c: f64) -> f64 {
    let mut v = [a, b, c];
    v.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ((1.0 - v[0]) - v[1]) - v[2]
}

/// Membership sum `((x00+x10)/n)^(1/k) + ((x00+x01)/n)^(1/k) - (x00/n)^(1/k)`.
pub fn membership_sum(x: &PoolCounts, design: PoolDesign) -> f64 {
    let s1 = (x.x00 + x.x10) as f64;
    let s2 = (x.x00 + x.x01) as f64;
    design.root(s1) + design.root(s2) - design.root(x.x00 as f64)
}

/// Whether the plug-in estimate for `x` stays inside the closed parameter
/// space, i.e. whether the closed-form estimator applies. Knife-edge count
/// vectors (sum within [`MEMBERSHIP_TOL`] of 1) are counted as inside.
pub fn in_closure_region(x: &PoolCounts, design: PoolDesign) -> bool {
    membership_sum(x, design) <= 1.0 + MEMBERSHIP_TOL
}

/// Multinomial log-likelihood kernel of `p` given pool counts, with the
/// `0 * log 0 = 0` convention. Returns `-inf` when a cell with positive count
/// has zero probability. With `include_coefficient` the log multinomial
/// coefficient is added (computed through log-gamma).
pub fn log_likelihood(
    p: &TraitPrevalence,
    x: &PoolCounts,
    design: PoolDesign,
    include_coefficient: bool,
) -> Result<f64, ModelError> {
    x.check_design(design)?;
    let theta = theta_from_p(p, design.k())?;
    let mut value = kernel_given_theta(&theta, x);
    if include_coefficient {
        value += ln_multinomial_coefficient(&x.cells());
    }
    Ok(value)
}

/// Kernel value for a known theta; shared by the estimators.
pub(crate) fn kernel_given_theta(theta: &ThetaVector, x: &PoolCounts) -> f64 {
    let cells = theta.cells();
    let counts = x.cells();
    let mut total = 0.0;
    for (&c, &t) in counts.iter().zip(cells.iter()) {
        if c > 0 {
            if t <= 0.0 {
                return f64::NEG_INFINITY;
            }
            total += c as f64 * t.ln();
        }
    }
    total
}

/// Kernel log-likelihood of the two-parameter boundary model; identical to
/// [`log_likelihood`] evaluated at `(p10, p01, 0)` without the coefficient.
pub fn reduced_log_likelihood(
    pstar: &ReducedPrevalence,
    x: &PoolCounts,
    design: PoolDesign,
) -> Result<f64, ModelError> {
    log_likelihood(&pstar.lift(), x, design, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(k: u32, n: u32) -> PoolDesign {
        PoolDesign::new(k, n).unwrap()
    }

    #[test]
    fn theta_identity_at_k1() {
        let p = TraitPrevalence::new(0.25, 0.25, 0.25).unwrap();
        let t = theta_from_p(&p, 1).unwrap();
        assert_eq!(t.theta10(), 0.25);
        assert_eq!(t.theta01(), 0.25);
        assert_eq!(t.theta11(), 0.25);
        assert_eq!(t.theta00(), 0.25);
    }

    #[test]
    fn theta_k2_small_point() {
        let p = TraitPrevalence::new(0.1, 0.1, 0.1).unwrap();
        let t = theta_from_p(&p, 2).unwrap();
        assert!((t.theta10() - 0.15).abs() < 1e-15);
        assert!((t.theta01() - 0.15).abs() < 1e-15);
        assert!((t.theta11() - 0.21).abs() < 1e-15);
        assert!((t.theta00() - 0.49).abs() < 1e-15);
    }

    #[test]
    fn theta_extended_accepts_diagnostic_point() {
        // Outside the parameter space yet mapping into the theta simplex.
        let p = TraitPrevalence::new_unchecked(0.484, 0.484, -0.192);
        assert!(theta_from_p(&p, 2).is_err());
        let t = theta_from_p_extended(&p, 2);
        assert!((t.theta10() - 0.45).abs() < 2e-3);
        assert!((t.theta01() - 0.45).abs() < 2e-3);
        assert!((t.theta11() - 0.05).abs() < 3e-3);
    }

    #[test]
    fn inverse_map_identity_at_k1() {
        let t = ThetaVector::new(0.2, 0.3, 0.1).unwrap();
        let p = p_from_theta(&t, 1).unwrap();
        assert!((p.p10() - 0.2).abs() < 1e-15);
        assert!((p.p01() - 0.3).abs() < 1e-15);
        assert!((p.p11() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn inverse_map_can_leave_parameter_space() {
        let t = ThetaVector::new(0.45, 0.45, 0.05).unwrap();
        let p = p_from_theta(&t, 2).unwrap();
        assert!((p.p10() - 0.484).abs() < 2e-3);
        assert!((p.p01() - 0.484).abs() < 2e-3);
        assert!((p.p11() + 0.192).abs() < 2e-3);
        assert!(!p.in_closure());
    }

    #[test]
    fn inverse_round_trip_k2() {
        let t = ThetaVector::new(0.15, 0.15, 0.21).unwrap();
        let p = p_from_theta(&t, 2).unwrap();
        assert!((p.p10() - 0.1).abs() < 1e-12);
        assert!((p.p01() - 0.1).abs() < 1e-12);
        assert!((p.p11() - 0.1).abs() < 1e-12);
        let t2 = theta_from_p(&TraitPrevalence::new(p.p10(), p.p01(), p.p11()).unwrap(), 2).unwrap();
        assert!((t2.theta10() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn membership_examples() {
        // All-positive pools are always inside.
        let x = PoolCounts::new(0, 0, 0, 7);
        assert!(in_closure_region(&x, d(3, 7)));

        // Dataset with a boundary estimate.
        let x = PoolCounts::new(3, 25, 5, 2);
        assert!(!in_closure_region(&x, d(10, 35)));

        let x = PoolCounts::new(5, 3, 1, 1);
        assert!(in_closure_region(&x, d(2, 10)));
        assert!((membership_sum(&x, d(2, 10)) - 0.961_916_7).abs() < 1e-6);
    }

    #[test]
    fn log_likelihood_point_mass() {
        let p = TraitPrevalence::new(0.0, 0.0, 0.0).unwrap();
        let x = PoolCounts::new(12, 0, 0, 0);
        assert_eq!(log_likelihood(&p, &x, d(4, 12), false).unwrap(), 0.0);
    }

    #[test]
    fn log_likelihood_impossible_outcome() {
        // theta11 = 0 whenever p11 = 0 and one of p10, p01 is 0.
        let p = TraitPrevalence::new(0.3, 0.0, 0.0).unwrap();
        let x = PoolCounts::new(5, 3, 1, 1);
        let v = log_likelihood(&p, &x, d(2, 10), false).unwrap();
        assert_eq!(v, f64::NEG_INFINITY);
    }

    #[test]
    fn log_likelihood_table_instance() {
        // Converged boundary estimate for x = (3, 25, 5, 2), k = 10:
        // kernel near -35.60, coefficient near +26.86, total near -8.737.
        let p = TraitPrevalence::new(0.139, 0.022, 0.0).unwrap();
        let x = PoolCounts::new(3, 25, 5, 2);
        let kernel = log_likelihood(&p, &x, d(10, 35), false).unwrap();
        let full = log_likelihood(&p, &x, d(10, 35), true).unwrap();
        assert!((kernel - -35.597_614).abs() < 1e-4);
        assert!((full - -8.737_44).abs() < 1e-4);
        assert!((full - kernel - 26.860_172).abs() < 1e-4);
    }

    #[test]
    fn reduced_log_likelihood_matches_full_kernel() {
        let x = PoolCounts::new(3, 25, 5, 2);
        let pstar = ReducedPrevalence::new(0.139, 0.022).unwrap();
        let a = reduced_log_likelihood(&pstar, &x, d(10, 35)).unwrap();
        let b = log_likelihood(&pstar.lift(), &x, d(10, 35), false).unwrap();
        assert_eq!(a, b);
        assert!((a - -35.597_614).abs() < 1e-4);
    }

    #[test]
    fn reduced_log_likelihood_boundary_cell() {
        // p00 = 0 with x00 > 0 forces -inf.
        let pstar = ReducedPrevalence::new_closed(0.5, 0.5).unwrap();
        let x = PoolCounts::new(5, 3, 1, 1);
        assert_eq!(
            reduced_log_likelihood(&pstar, &x, d(2, 10)).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn count_mismatch_is_rejected() {
        let p = TraitPrevalence::new(0.1, 0.1, 0.1).unwrap();
        let x = PoolCounts::new(5, 3, 1, 1);
        let err = log_likelihood(&p, &x, d(2, 11), false).unwrap_err();
        assert_eq!(err, ModelError::CountMismatch { total: 10, n: 11 });
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(TraitPrevalence::new(-0.1, 0.2, 0.2).is_err());
        assert!(TraitPrevalence::new(0.5, 0.4, 0.2).is_err());
        assert!(TraitPrevalence::new(f64::NAN, 0.1, 0.1).is_err());
        assert!(PoolDesign::new(0, 5).is_err());
        assert!(PoolDesign::new(5, 0).is_err());
        assert!(ReducedPrevalence::new(0.0, 0.5).is_err());
        assert!(ReducedPrevalence::new(0.5, 0.5).is_err());
        assert!(ReducedPrevalence::new_closed(0.5, 0.5).is_ok());
        assert!(ThetaVector::new(0.6, 0.5, 0.1).is_err());
    }
}
