//! Reference derivative-free maximizer of the kernel likelihood over the
//! full three-parameter space. A diagnostic tool for cross-checking the EM
//! estimator: plain simplex search has no global guarantee here and can
//! stagnate depending on the starting value.

use crate::model::{
    kernel_given_theta, theta_from_p_extended, PoolCounts, PoolDesign, TraitPrevalence,
};

use super::EstimatorError;

const REFLECTION: f64 = 1.0;
const EXPANSION: f64 = 2.0;
const CONTRACTION: f64 = 0.5;
const SHRINK: f64 = 0.5;
const INITIAL_OFFSET: f64 = 0.05;
const MAX_ITERATIONS: u32 = 5000;
const SPREAD_TOL: f64 = 1e-8;
const WALL: f64 = -1e10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOutcome {
    pub estimate: TraitPrevalence,
    /// Kernel log-likelihood at the returned point.
    pub kernel_log_likelihood: f64,
    pub iterations: u32,
    /// False when the iteration cap was hit before the simplex collapsed.
    pub converged: bool,
}

fn objective(v: [f64; 3], x: &PoolCounts, k: u32) -> f64 {
    let p00 = 1.0 - v[0] - v[1] - v[2];
    if v[0] < 0.0 || v[1] < 0.0 || v[2] < 0.0 || p00 < 0.0 {
        return WALL;
    }
    let theta = theta_from_p_extended(&TraitPrevalence::new_unchecked(v[0], v[1], v[2]), k);
    kernel_given_theta(&theta, x)
}

/// Simplex search started from `start`, with vertices offset by +0.05 along
/// each axis and a hard penalty outside the closed parameter space.
pub fn nelder_mead_reference(
    x: &PoolCounts,
    design: PoolDesign,
    start: &TraitPrevalence,
) -> Result<SimplexOutcome, EstimatorError> {
    x.check_design(design)?;
    let k = design.k();
    let s = start.components();
    let mut simplex: Vec<[f64; 3]> = vec![s; 4];
    for i in 0..3 {
        simplex[i + 1][i] += INITIAL_OFFSET;
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| objective(*v, x, k)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        // Best first; stable sort keeps tie order deterministic.
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
        simplex = order.iter().map(|&i| simplex[i]).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if (values[0] - values[3]).abs() < SPREAD_TOL {
            converged = true;
            break;
        }

        let mut centroid = [0.0; 3];
        for v in simplex.iter().take(3) {
            for (c, vi) in centroid.iter_mut().zip(v.iter()) {
                *c += vi / 3.0;
            }
        }
        let worst = simplex[3];
        let reflect = |t: f64| {
            let mut out = [0.0; 3];
            for i in 0..3 {
                out[i] = centroid[i] + t * (centroid[i] - worst[i]);
            }
            out
        };

        let refl = reflect(REFLECTION);
        let f_refl = objective(refl, x, k);
        if f_refl > values[0] {
            let exp = reflect(EXPANSION);
            let f_exp = objective(exp, x, k);
            if f_exp > f_refl {
                simplex[3] = exp;
                values[3] = f_exp;
            } else {
                simplex[3] = refl;
                values[3] = f_refl;
            }
        } else if f_refl > values[2] {
            simplex[3] = refl;
            values[3] = f_refl;
        } else {
            let contr = reflect(-CONTRACTION);
            let f_contr = objective(contr, x, k);
            if f_contr > values[3] {
                simplex[3] = contr;
                values[3] = f_contr;
            } else {
                let best = simplex[0];
                for i in 1..4 {
                    for j in 0..3 {
                        simplex[i][j] = best[j] + SHRINK * (simplex[i][j] - best[j]);
                    }
                    values[i] = objective(simplex[i], x, k);
                }
            }
        }
    }

    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let v = simplex[best];
    Ok(SimplexOutcome {
        estimate: TraitPrevalence::new_unchecked(v[0], v[1], v[2]),
        kernel_log_likelihood: values[best],
        iterations,
        converged,
    })
}
