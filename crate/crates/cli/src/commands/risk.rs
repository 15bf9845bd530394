use clap::{Args, ValueEnum};
use grouptest::estimators::EmConfig;
use grouptest::risk::{exact_risk_set, monte_carlo_risk_set, sample_space_size, RiskMethod};
use grouptest::{EstimatorRisks, RiskSummary};

use crate::output::{Cell, Metadata, Table};
use crate::{CliError, CmdResult};

use super::{design_of, interior_prevalence, parse_triple, EstimatorArg};

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Mc,
}

#[derive(Args)]
pub struct RiskArgs {
    /// True prevalence p10,p01,p11 (strictly interior)
    #[arg(long, value_parser = parse_triple)]
    pub p: [f64; 3],

    /// Number of pools
    #[arg(long)]
    pub n: u32,

    /// Group size (units per pool)
    #[arg(long)]
    pub k: u32,

    /// Which estimator(s) to evaluate
    #[arg(long, value_enum, default_value_t = EstimatorArg::All)]
    pub estimator: EstimatorArg,

    /// Exact enumeration or seeded Monte Carlo
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    pub method: MethodArg,

    /// Monte-Carlo sample count
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,

    /// Monte-Carlo seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Exact-enumeration budget (outcome count); larger spaces fall back to
    /// Monte Carlo with a warning
    #[arg(long, default_value_t = grouptest::DEFAULT_ENUMERATION_BUDGET)]
    pub budget: u64,
}

pub const RISK_COLUMNS: [&str; 30] = [
    "estimator",
    "n",
    "k",
    "p10",
    "p01",
    "p11",
    "boundary_probability",
    "expectation_10",
    "expectation_01",
    "expectation_11",
    "bias_10",
    "bias_01",
    "bias_11",
    "rel_bias_10",
    "rel_bias_01",
    "rel_bias_11",
    "mse_10",
    "mse_01",
    "mse_11",
    "avg_abs_rel_bias",
    "avg_mse",
    "method",
    "samples",
    "seed",
    "se_expectation_10",
    "se_expectation_01",
    "se_expectation_11",
    "se_mse_10",
    "se_mse_01",
    "se_mse_11",
];

pub fn summary_row(s: &RiskSummary) -> Vec<Cell> {
    let (method, samples, seed) = match s.method {
        RiskMethod::Exact => ("exact", None, None),
        RiskMethod::MonteCarlo { samples, seed } => ("mc", Some(samples), Some(seed)),
    };
    let se = s.standard_errors;
    let mut row = vec![
        Cell::from(s.estimator.name()),
        Cell::Int(u64::from(s.design.n())),
        Cell::Int(u64::from(s.design.k())),
        Cell::Float(s.true_p.p10()),
        Cell::Float(s.true_p.p01()),
        Cell::Float(s.true_p.p11()),
        Cell::Float(s.boundary_probability),
    ];
    for c in &s.components {
        row.push(Cell::Float(c.expectation));
    }
    for c in &s.components {
        row.push(Cell::Float(c.bias));
    }
    for c in &s.components {
        row.push(Cell::OptFloat(c.relative_bias_percent));
    }
    for c in &s.components {
        row.push(Cell::Float(c.mse));
    }
    row.push(Cell::OptFloat(s.avg_abs_relative_bias));
    row.push(Cell::Float(s.avg_mse));
    row.push(Cell::from(method));
    row.push(samples.map(Cell::Int).unwrap_or(Cell::Str(String::new())));
    row.push(seed.map(Cell::Int).unwrap_or(Cell::Str(String::new())));
    for i in 0..3 {
        row.push(Cell::OptFloat(se.map(|e| e.expectation[i])));
    }
    for i in 0..3 {
        row.push(Cell::OptFloat(se.map(|e| e.mse[i])));
    }
    row
}

pub fn run(args: RiskArgs) -> CmdResult {
    let design = design_of(args.k, args.n)?;
    let p = interior_prevalence(args.p)?;
    let em = EmConfig::default();

    let required = sample_space_size(args.n);
    let use_exact = match args.method {
        MethodArg::Exact => {
            if required > args.budget {
                eprintln!(
                    "warning: enumerating {required} outcomes exceeds the budget of {}; \
                     falling back to Monte Carlo with {} samples (seed {})",
                    args.budget, args.samples, args.seed
                );
                false
            } else {
                true
            }
        }
        MethodArg::Mc => false,
    };

    let set: EstimatorRisks = if use_exact {
        exact_risk_set(&[p], design, &em, args.budget)
            .map_err(|e| CliError::Run(e.to_string()))?
            .pop()
            .expect("one point requested")
    } else {
        monte_carlo_risk_set(&p, design, &em, args.samples, args.seed)
            .map_err(|e| CliError::Run(e.to_string()))?
    };

    let mut table = Table::new(&RISK_COLUMNS);
    for kind in args.estimator.kinds() {
        table.push_row(summary_row(set.get(kind)));
    }

    let mut metadata = Metadata::new();
    metadata.push("command", "risk");
    metadata.push("version", env!("CARGO_PKG_VERSION"));
    metadata.push("method", if use_exact { "exact" } else { "mc" });
    if !use_exact {
        metadata.push("samples", args.samples);
        metadata.push("seed", args.seed);
        metadata.push("rng", grouptest::risk::MC_RNG_ALGORITHM);
    }
    metadata.push("outcomes", required);
    metadata.push("em_epsilon", 1e-10_f64);
    Ok((table, metadata))
}
