pub mod bias;
pub mod cov;
pub mod estimate;
pub mod reproduce;
pub mod risk;

use clap::ValueEnum;
use grouptest::{EstimatorKind, PoolCounts, PoolDesign, TraitPrevalence};

use crate::CliError;

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Mle,
    Rmm,
    Burrows,
    All,
}

impl EstimatorArg {
    pub fn kinds(self) -> Vec<EstimatorKind> {
        match self {
            EstimatorArg::Mle => vec![EstimatorKind::Mle],
            EstimatorArg::Rmm => vec![EstimatorKind::Rmm],
            EstimatorArg::Burrows => vec![EstimatorKind::Burrows],
            EstimatorArg::All => EstimatorKind::ALL.to_vec(),
        }
    }
}

/// Comma-separated list of exactly `N` floats.
fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated values, got {}", parts.len()));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("invalid number {part:?}: {e}"))?;
    }
    Ok(out)
}

pub fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    parse_floats::<2>(s)
}

pub fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    parse_floats::<3>(s)
}

pub fn parse_counts(s: &str) -> Result<[u64; 4], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!(
            "expected counts x00,x10,x01,x11 (4 values), got {}",
            parts.len()
        ));
    }
    let mut out = [0u64; 4];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse::<u64>()
            .map_err(|e| format!("invalid count {part:?}: {e}"))?;
    }
    Ok(out)
}

pub fn design_of(k: u32, n: u32) -> Result<PoolDesign, CliError> {
    PoolDesign::new(k, n).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn counts_of(raw: [u64; 4], n: u32) -> Result<PoolCounts, CliError> {
    let x = PoolCounts::new(raw[0], raw[1], raw[2], raw[3]);
    if x.total() != u64::from(n) {
        return Err(CliError::Usage(format!(
            "counts {},{},{},{} sum to {} but --n is {n}",
            raw[0],
            raw[1],
            raw[2],
            raw[3],
            x.total()
        )));
    }
    Ok(x)
}

pub fn closed_prevalence(p: [f64; 3]) -> Result<TraitPrevalence, CliError> {
    TraitPrevalence::new(p[0], p[1], p[2]).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn interior_prevalence(p: [f64; 3]) -> Result<TraitPrevalence, CliError> {
    let tp = closed_prevalence(p)?;
    if !tp.is_interior() {
        return Err(CliError::Usage(format!(
            "prevalence ({}, {}, {}) must be strictly interior (all four cells in (0, 1))",
            p[0], p[1], p[2]
        )));
    }
    Ok(tp)
}
