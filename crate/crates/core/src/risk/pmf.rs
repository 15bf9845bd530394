//! Sample-space enumeration and log-probability weights for pool counts.

use crate::model::{theta_from_p, ModelError, PoolCounts, PoolDesign, TraitPrevalence};
use crate::numeric::ln_factorial_table;

/// Number of distinct count vectors for n pools: C(n+3, 3).
pub fn sample_space_size(n: u32) -> u64 {
    let n = u128::from(n);
    (((n + 1) * (n + 2) * (n + 3)) / 6) as u64
}

/// All count vectors in lexicographic order of `(x00, x10, x01)`.
pub fn enumerate_sample_space(design: PoolDesign) -> impl Iterator<Item = PoolCounts> {
    let n = u64::from(design.n());
    (0..=n).flat_map(move |x00| {
        (0..=n - x00).flat_map(move |x10| {
            (0..=n - x00 - x10)
                .map(move |x01| PoolCounts::new(x00, x10, x01, n - x00 - x10 - x01))
        })
    })
}

/// Log-weight evaluator for the multinomial law of pool counts under a fixed
/// prevalence: table-driven, with zero-count cells contributing zero even
/// when the corresponding theta cell is zero.
#[derive(Debug, Clone)]
pub struct LogPmf {
    ln_theta: [f64; 4],
    lfact: Vec<f64>,
    n: u32,
}

impl LogPmf {
    pub fn new(p: &TraitPrevalence, design: PoolDesign) -> Result<Self, ModelError> {
        let theta = theta_from_p(p, design.k())?;
        let mut ln_theta = [0.0; 4];
        for (slot, cell) in ln_theta.iter_mut().zip(theta.cells()) {
            *slot = if cell > 0.0 {
                cell.ln()
            } else {
                f64::NEG_INFINITY
            };
        }
        Ok(Self {
            ln_theta,
            lfact: ln_factorial_table(design.n() as usize),
            n: design.n(),
        })
    }

    /// ln P(x); `-inf` for outcomes whose positive cells have zero probability.
    #[inline]
    pub fn log_weight(&self, x: &PoolCounts) -> f64 {
        debug_assert_eq!(x.total(), u64::from(self.n));
        let mut lw = self.lfact[self.n as usize];
        for (&c, &lt) in x.cells().iter().zip(self.ln_theta.iter()) {
            if c > 0 {
                lw += c as f64 * lt - self.lfact[c as usize];
            }
        }
        lw
    }

    /// P(x) as a plain probability; exactly 0 below the exp underflow range.
    #[inline]
    pub fn weight(&self, x: &PoolCounts) -> f64 {
        let lw = self.log_weight(x);
        if lw < -745.0 {
            0.0
        } else {
            lw.exp()
        }
    }
}
