//! Shared oracle helpers for the integration suites. Everything here is an
//! independent computation path: no estimator or covariance formula from the
//! crate is reused on the oracle side of a comparison.

#![allow(dead_code)]

use grouptest::model::{PoolCounts, PoolDesign, TraitPrevalence};
use grouptest::numeric::CompensatedSum;
use grouptest::risk::LogPmf;

/// Pool-level cell probabilities by brute-force enumeration of all 4^k joint
/// unit statuses; classification order (theta00, theta10, theta01, theta11).
pub fn theta_brute_force(p: &TraitPrevalence, k: u32) -> [f64; 4] {
    let cell_probs = [p.p00(), p.p10(), p.p01(), p.p11()];
    let mut out = [0.0; 4];
    let assignments = 4u64.pow(k);
    for code in 0..assignments {
        let mut prob = 1.0;
        let mut any1 = false;
        let mut any2 = false;
        let mut c = code;
        for _ in 0..k {
            let status = (c % 4) as usize;
            c /= 4;
            prob *= cell_probs[status];
            // status encoding: 0 = neither, 1 = trait-one only, 2 = trait-two only, 3 = both
            any1 |= status == 1 || status == 3;
            any2 |= status == 2 || status == 3;
        }
        let class = match (any1, any2) {
            (false, false) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (true, true) => 3,
        };
        out[class] += prob;
    }
    out
}

/// Central-difference Jacobian of the inverse map h at theta, order
/// d(p10, p01, p11) / d(theta10, theta01, theta11).
pub fn inverse_map_jacobian(theta: [f64; 3], k: u32) -> [[f64; 3]; 3] {
    let h = 1e-7;
    let eval = |t: [f64; 3]| -> [f64; 3] {
        let tv = grouptest::ThetaVector::new_unchecked(t[0], t[1], t[2]);
        grouptest::p_from_theta(&tv, k).unwrap().components()
    };
    let mut jac = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut up = theta;
        let mut dn = theta;
        up[j] += h;
        dn[j] -= h;
        let fu = eval(up);
        let fd = eval(dn);
        for i in 0..3 {
            jac[i][j] = (fu[i] - fd[i]) / (2.0 * h);
        }
    }
    jac
}

/// Delta-method covariance scaled like the closed form: k^2 J (diag(theta) -
/// theta theta') J'.
pub fn delta_method_sigma(p: &TraitPrevalence, k: u32) -> [[f64; 3]; 3] {
    let tv = grouptest::theta_from_p(p, k).unwrap();
    let theta = [tv.theta10(), tv.theta01(), tv.theta11()];
    let jac = inverse_map_jacobian(theta, k);
    let mut cov = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            cov[i][j] = if i == j { theta[i] } else { 0.0 } - theta[i] * theta[j];
        }
    }
    let kf = k as f64;
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    acc += jac[i][a] * cov[a][b] * jac[j][b];
                }
            }
            out[i][j] = kf * kf * acc;
        }
    }
    out
}

/// First and second moments of the raw (untruncated) plug-in terms over the
/// full sample space: the objects the large-sample expansions describe.
/// `shift` is 0 for the plain roots and the shrinkage constant for the
/// Burrows variant.
pub struct RawPluginMoments {
    pub expectation: [f64; 3],
    pub covariance: [[f64; 3]; 3],
}

pub fn raw_plugin_moments(p: &TraitPrevalence, design: PoolDesign, shift: f64) -> RawPluginMoments {
    use rayon::prelude::*;
    let pmf = LogPmf::new(p, design).unwrap();
    let n = u64::from(design.n());
    let nf = n as f64;
    let inv_k = 1.0 / f64::from(design.k());
    let roots: Vec<f64> = (0..=n)
        .map(|s| ((s as f64 + shift) / (nf + shift)).powf(inv_k))
        .collect();

    let partials: Vec<[CompensatedSum; 9]> = (0..=n)
        .into_par_iter()
        .map(|x00| {
            let mut acc = [CompensatedSum::new(); 9];
            for x10 in 0..=n - x00 {
                for x01 in 0..=n - x00 - x10 {
                    let x = PoolCounts::new(x00, x10, x01, n - x00 - x10 - x01);
                    let w = pmf.weight(&x);
                    if w == 0.0 {
                        continue;
                    }
                    let g1 = roots[(x00 + x10) as usize];
                    let g2 = roots[(x00 + x01) as usize];
                    let g3 = roots[x00 as usize];
                    let p11 = 1.0 - g1 - g2 + g3;
                    let v = [1.0 - g2 - p11, 1.0 - g1 - p11, p11];
                    let mut idx = 0;
                    for i in 0..3 {
                        acc[idx].add(w * v[i]);
                        idx += 1;
                    }
                    for i in 0..3 {
                        for j in i..3 {
                            acc[idx].add(w * v[i] * v[j]);
                            idx += 1;
                        }
                    }
                }
            }
            acc
        })
        .collect();

    let mut total = [CompensatedSum::new(); 9];
    for part in &partials {
        for (t, s) in total.iter_mut().zip(part.iter()) {
            t.merge(s);
        }
    }
    let v: Vec<f64> = total.iter().map(|s| s.value()).collect();
    let e = [v[0], v[1], v[2]];
    let raw2 = [
        [v[3], v[4], v[5]],
        [v[4], v[6], v[7]],
        [v[5], v[7], v[8]],
    ];
    let mut cov = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            cov[i][j] = raw2[i][j] - e[i] * e[j];
        }
    }
    RawPluginMoments {
        expectation: e,
        covariance: cov,
    }
}

pub fn design(k: u32, n: u32) -> PoolDesign {
    PoolDesign::new(k, n).unwrap()
}

pub fn prevalence(p10: f64, p01: f64, p11: f64) -> TraitPrevalence {
    TraitPrevalence::new(p10, p01, p11).unwrap()
}
