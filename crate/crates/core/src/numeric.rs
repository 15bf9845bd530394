//! Compensated summation and log-factorial helpers shared by the risk engine.

use statrs::function::gamma::ln_gamma;

/// Neumaier-compensated accumulator for long probability-weighted sums.
///
/// Partial sums from independent chunks can be merged with [`CompensatedSum::merge`];
/// merging in a fixed chunk order keeps parallel reductions bit-stable across
/// thread counts.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator into this one (order-sensitive).
    #[inline]
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// ln(i!), exactly zero for i <= 1 (ln_gamma is not exact there).
#[inline]
pub fn ln_factorial(i: u64) -> f64 {
    if i <= 1 {
        0.0
    } else {
        ln_gamma(i as f64 + 1.0)
    }
}

/// Table of ln(i!) for i in 0..=n.
pub fn ln_factorial_table(n: usize) -> Vec<f64> {
    (0..=n as u64).map(ln_factorial).collect()
}

/// ln of the multinomial coefficient total! / prod(counts!).
pub fn ln_multinomial_coefficient(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let mut v = ln_factorial(total);
    for &c in counts {
        v -= ln_factorial(c);
    }
    v
}
