//! Seeded Monte-Carlo fallback for pool counts too numerous to enumerate.
//!
//! Draws are ChaCha12-generated (64-bit seed via `seed_from_u64`); samples
//! are split into fixed chunks of [`MC_CHUNK`] with the chunk index as the
//! ChaCha stream, and chunk partials merge in index order. Results are
//! therefore deterministic for a fixed seed regardless of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::estimators::EmConfig;
use crate::model::{in_closure_region, theta_from_p, PoolCounts, PoolDesign, TraitPrevalence};
use crate::numeric::CompensatedSum;

use super::exact::evaluate_estimators;
use super::RiskError;

/// RNG algorithm identifier reported in output metadata.
pub const MC_RNG_ALGORITHM: &str = "chacha12/stream-per-chunk";

/// Samples per RNG stream chunk.
pub const MC_CHUNK: u64 = 65_536;

#[derive(Clone)]
pub(crate) struct McAccumulator {
    pub samples: u64,
    pub boundary: u64,
    /// Sums of estimates, their squares, squared errors, and fourth powers
    /// of errors, componentwise.
    pub e: [CompensatedSum; 3],
    pub e2: [CompensatedSum; 3],
    pub sq: [CompensatedSum; 3],
    pub sq2: [CompensatedSum; 3],
}

impl McAccumulator {
    fn new() -> Self {
        Self {
            samples: 0,
            boundary: 0,
            e: [CompensatedSum::new(); 3],
            e2: [CompensatedSum::new(); 3],
            sq: [CompensatedSum::new(); 3],
            sq2: [CompensatedSum::new(); 3],
        }
    }

    #[inline]
    fn add(&mut self, est: &[f64; 3], truth: &[f64; 3], off_boundary: bool) {
        self.samples += 1;
        self.boundary += u64::from(off_boundary);
        for i in 0..3 {
            let d = est[i] - truth[i];
            self.e[i].add(est[i]);
            self.e2[i].add(est[i] * est[i]);
            self.sq[i].add(d * d);
            self.sq2[i].add(d * d * d * d);
        }
    }

    fn merge(&mut self, other: &McAccumulator) {
        self.samples += other.samples;
        self.boundary += other.boundary;
        for i in 0..3 {
            self.e[i].merge(&other.e[i]);
            self.e2[i].merge(&other.e2[i]);
            self.sq[i].merge(&other.sq[i]);
            self.sq2[i].merge(&other.sq2[i]);
        }
    }
}

fn draw_counts(rng: &mut ChaCha12Rng, theta: &[f64; 4], n: u64) -> PoolCounts {
    // Chain of binomial conditionals over the four cells.
    let mut remaining = n;
    let mut rest = 1.0;
    let mut cells = [0u64; 4];
    for i in 0..3 {
        if remaining == 0 {
            break;
        }
        let q = (theta[i] / rest).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining, q)
            .expect("cell probability in [0, 1]")
            .sample(rng);
        cells[i] = draw;
        remaining -= draw;
        rest -= theta[i];
    }
    cells[3] = remaining;
    PoolCounts::new(cells[0], cells[1], cells[2], cells[3])
}

pub(crate) fn run_monte_carlo(
    p: &TraitPrevalence,
    design: PoolDesign,
    em: &EmConfig,
    samples: u64,
    seed: u64,
) -> Result<(McAccumulator, [McAccumulator; 2]), RiskError> {
    // Accumulates all three estimators: (mle, rmm, burrows) where the first
    // element of the tuple is mle and the array holds the other two.
    if samples == 0 {
        return Err(RiskError::NoSamples);
    }
    if !p.is_interior() {
        return Err(RiskError::BoundaryPrevalence {
            p10: p.p10(),
            p01: p.p01(),
            p11: p.p11(),
        });
    }
    let theta_vec = theta_from_p(p, design.k())?;
    let theta = theta_vec.cells();
    // observation order (x00, x10, x01, x11)
    let truth = p.components();
    let chunks = samples.div_ceil(MC_CHUNK);

    let partials: Vec<[McAccumulator; 3]> = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<[McAccumulator; 3], RiskError> {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(chunk + 1);
            let lo = chunk * MC_CHUNK;
            let hi = ((chunk + 1) * MC_CHUNK).min(samples);
            let mut accs = [
                McAccumulator::new(),
                McAccumulator::new(),
                McAccumulator::new(),
            ];
            for _ in lo..hi {
                let x = draw_counts(&mut rng, &theta, u64::from(design.n()));
                let off = !in_closure_region(&x, design);
                let estimates = evaluate_estimators(&x, design, em)?;
                for (acc, est) in accs.iter_mut().zip(estimates.iter()) {
                    acc.add(est, &truth, off);
                }
            }
            Ok(accs)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut totals = [
        McAccumulator::new(),
        McAccumulator::new(),
        McAccumulator::new(),
    ];
    for part in &partials {
        for (t, p) in totals.iter_mut().zip(part.iter()) {
            t.merge(p);
        }
    }
    let [m, r, b] = totals;
    Ok((m, [r, b]))
}
