//! Property suites for the model layer: round trips, the brute-force pooling
//! oracle, concavity of the kernel, and exact-arithmetic agreement of the
//! closure-region membership test.

mod common;

use common::{design, prevalence, theta_brute_force};
use grouptest::model::{
    in_closure_region, log_likelihood, membership_sum, p_from_theta, theta_from_p, PoolCounts,
    TraitPrevalence,
};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Random interior point in the pooled-screening regime of small
/// prevalences (p00 at least 0.65). Near the opposite simplex corner the
/// theta cells collapse below double precision for the largest group sizes
/// and no inverse can recover them.
fn random_interior(rng: &mut ChaCha12Rng) -> TraitPrevalence {
    loop {
        let p10 = rng.random_range(1e-4..0.35);
        let p01 = rng.random_range(1e-4..0.35);
        let p11 = rng.random_range(1e-4..0.35);
        if p10 + p01 + p11 < 0.35 {
            return prevalence(p10, p01, p11);
        }
    }
}

#[test]
fn round_trip_thousand_points() {
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        let p = random_interior(&mut rng);
        for k in [1u32, 2, 5, 10, 25] {
            let theta = theta_from_p(&p, k).unwrap();
            let back = p_from_theta(&theta, k).unwrap();
            for (a, b) in back.components().iter().zip(p.components()) {
                assert!(
                    (a - b).abs() < 1e-12,
                    "k={k}: {:?} -> {:?}",
                    p.components(),
                    back.components()
                );
            }
        }
    }
}

#[test]
fn brute_force_pooling_oracle() {
    let mut rng = ChaCha12Rng::seed_from_u64(0xbf0e);
    for _ in 0..200 {
        let p = random_interior(&mut rng);
        for k in [1u32, 2, 3] {
            let theta = theta_from_p(&p, k).unwrap();
            let oracle = theta_brute_force(&p, k);
            let got = theta.cells();
            for (g, o) in got.iter().zip(oracle.iter()) {
                assert!((g - o).abs() < 1e-12, "k={k} got {got:?} oracle {oracle:?}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn theta_cells_stay_in_unit_interval(
        a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0, k in 1u32..26
    ) {
        // Scale the raw triple into the closed simplex (strictly, so that
        // the derived p00 cannot round below zero).
        let s = a + b + c;
        let scale = if s > 1.0 { (1.0 - 1e-12) / s } else { 1.0 };
        let p = TraitPrevalence::new(a * scale, b * scale, c * scale).unwrap();
        let theta = theta_from_p(&p, k).unwrap();
        let cells = theta.cells();
        let mut total = 0.0;
        for t in cells {
            prop_assert!((0.0..=1.0).contains(&t), "cells {cells:?}");
            total += t;
        }
        prop_assert!((total - 1.0).abs() < 1e-14);
        prop_assert!((cells[0] - p.p00().powi(k as i32)).abs() < 1e-14);
    }

    #[test]
    fn midpoint_concavity_of_kernel(
        seed in any::<u64>(), t in 0.01f64..0.99, k in 1u32..11, n in 4u32..40
    ) {
        // Strict concavity holds for interior counts; midpoint version with
        // slack. Group sizes are capped where kernel evaluation noise stays
        // well under the slack.
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let p = random_interior(&mut rng);
        let q = random_interior(&mut rng);
        let d = design(k, n);
        let c1 = rng.random_range(1..n.max(4) - 2);
        let c2 = rng.random_range(c1 + 1..n.max(4) - 1);
        let c3 = rng.random_range(c2 + 1..n.max(4));
        let x = PoolCounts::new(
            u64::from(c1),
            u64::from(c2 - c1),
            u64::from(c3 - c2),
            u64::from(n - c3),
        );
        prop_assume!(x.is_interior());
        let m = TraitPrevalence::new(
            t * p.p10() + (1.0 - t) * q.p10(),
            t * p.p01() + (1.0 - t) * q.p01(),
            t * p.p11() + (1.0 - t) * q.p11(),
        ).unwrap();
        let lm = log_likelihood(&m, &x, d, false).unwrap();
        let lp = log_likelihood(&p, &x, d, false).unwrap();
        let lq = log_likelihood(&q, &x, d, false).unwrap();
        prop_assert!(lm >= t * lp + (1.0 - t) * lq - 1e-10);
    }

    #[test]
    fn reduced_kernel_consistency(
        seed in any::<u64>(), k in 1u32..26, n in 2u32..60
    ) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let p10 = rng.random_range(0.01..0.6);
        let p01 = rng.random_range(0.01..f64::min(1.0 - p10 - 0.01, 0.6));
        let pstar = grouptest::ReducedPrevalence::new(p10, p01).unwrap();
        let d = design(k, n);
        let c1 = rng.random_range(0..=n);
        let c2 = rng.random_range(0..=n - c1);
        let c3 = rng.random_range(0..=n - c1 - c2);
        let x = PoolCounts::new(
            u64::from(c1), u64::from(c2), u64::from(c3), u64::from(n - c1 - c2 - c3),
        );
        let a = grouptest::reduced_log_likelihood(&pstar, &x, d).unwrap();
        let b = log_likelihood(&pstar.lift(), &x, d, false).unwrap();
        prop_assert!(a == b || (a.is_infinite() && b.is_infinite()));
    }
}

/// Floor of M * ((v + shift_num) / den)^(1/k) in exact integer arithmetic.
fn scaled_root(v: u64, den: u64, k: u32, scale: &BigUint) -> BigUint {
    // (v * scale^k / den) then integer k-th root.
    let num = BigUint::from(v) * scale.pow(k) / BigUint::from(den);
    num.nth_root(k)
}

#[test]
fn membership_agrees_with_exact_arithmetic() {
    // Exhaustive over n <= 10: the floating membership decision must match a
    // high-precision integer evaluation of the defining inequality, except
    // inside the deliberate knife-edge slack where the float test says
    // "inside" by design.
    let scale = BigUint::from(10u32).pow(25);
    let tol = &scale / BigUint::from(10u32).pow(12); // 1e-12 in scaled units
    let guard = BigUint::from(4u32); // floor error budget
    for n in 1u32..=10 {
        for k in [1u32, 2, 3, 5, 10] {
            let d = design(k, n);
            for x00 in 0..=u64::from(n) {
                for x10 in 0..=u64::from(n) - x00 {
                    for x01 in 0..=u64::from(n) - x00 - x10 {
                        let x = PoolCounts::new(
                            x00,
                            x10,
                            x01,
                            u64::from(n) - x00 - x10 - x01,
                        );
                        let float_in = in_closure_region(&x, d);
                        let r1 = scaled_root(x00 + x10, u64::from(n), k, &scale);
                        let r2 = scaled_root(x00 + x01, u64::from(n), k, &scale);
                        let r3 = scaled_root(x00, u64::from(n), k, &scale);
                        // membership sum <= 1 + 1e-12, scaled
                        let lhs = r1 + r2;
                        let rhs = &scale + &tol + r3;
                        let exact_in = lhs <= &rhs + &guard;
                        let exact_in_strict = &lhs + &guard <= rhs;
                        if exact_in_strict {
                            assert!(float_in, "n={n} k={k} {x:?}: exact strictly in, float out (sum={})", membership_sum(&x, d));
                        } else if !exact_in {
                            assert!(!float_in, "n={n} k={k} {x:?}: exact strictly out, float in (sum={})", membership_sum(&x, d));
                        }
                        // Within the guard band both answers are acceptable.
                    }
                }
            }
        }
    }
}

#[test]
fn knife_edge_counts_classified_inside() {
    // x10 = 0 collapses the sum to a single root, which is at most 1; with
    // the second root equal to 1 the sum is exactly 1 and must stay inside.
    let d = design(3, 9);
    let x = PoolCounts::new(2, 0, 7, 0);
    assert!(in_closure_region(&x, d));
    assert!(membership_sum(&x, d) <= 1.0 + 1e-12);
    // k = 1: membership sum is 1 - x11/n, exactly 1 at x11 = 0.
    let d = design(1, 7);
    let x = PoolCounts::new(3, 2, 2, 0);
    assert!(in_closure_region(&x, d));
}
