use clap::Args;
use grouptest::estimators::{burrows, mle, rmm, EmConfig, EstimatePath};
use grouptest::model::{log_likelihood, ReducedPrevalence, TraitPrevalence};
use grouptest::numeric::ln_multinomial_coefficient;
use grouptest::EstimatorKind;

use crate::output::{Cell, Metadata, Table};
use crate::{CliError, CmdResult};

use super::{counts_of, design_of, parse_counts, parse_pair, EstimatorArg};

#[derive(Args)]
pub struct EstimateArgs {
    /// Number of pools
    #[arg(long)]
    pub n: u32,

    /// Group size (units per pool)
    #[arg(long)]
    pub k: u32,

    /// Observed pool counts x00,x10,x01,x11 (must sum to --n)
    #[arg(long, value_parser = parse_counts)]
    pub counts: [u64; 4],

    /// Which estimator(s) to report
    #[arg(long, value_enum, default_value_t = EstimatorArg::Mle)]
    pub estimator: EstimatorArg,

    /// EM stopping threshold on the kernel log-likelihood change
    #[arg(long, default_value_t = 1e-10)]
    pub epsilon: f64,

    /// EM iteration cap
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: u32,

    /// EM starting point p10,p01 (strictly interior)
    #[arg(long, value_parser = parse_pair, default_value = "0.25,0.25")]
    pub start: [f64; 2],

    /// Also report the log-likelihood including the multinomial coefficient
    #[arg(long)]
    pub full_loglik: bool,
}

pub fn run(args: EstimateArgs) -> CmdResult {
    let design = design_of(args.k, args.n)?;
    let x = counts_of(args.counts, args.n)?;
    let start = ReducedPrevalence::new(args.start[0], args.start[1])
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let config =
        EmConfig::new(args.epsilon, args.max_iter, start).map_err(|e| CliError::Usage(e.to_string()))?;

    let mut columns = vec![
        "estimator",
        "p10",
        "p01",
        "p11",
        "p00",
        "path",
        "iterations",
        "on_boundary",
        "kernel_log_likelihood",
    ];
    if args.full_loglik {
        columns.push("full_log_likelihood");
    }
    let mut table = Table::new(&columns);

    let coeff = ln_multinomial_coefficient(&x.cells());
    let mut push = |name: &str,
                    est: &TraitPrevalence,
                    path: &str,
                    iterations: u64,
                    on_boundary: Option<bool>,
                    kernel: f64| {
        let mut row = vec![
            Cell::from(name),
            Cell::Float(est.p10()),
            Cell::Float(est.p01()),
            Cell::Float(est.p11()),
            Cell::Float(est.p00()),
            Cell::from(path),
            Cell::Int(iterations),
            Cell::Str(on_boundary.map(|b| b.to_string()).unwrap_or_default()),
            Cell::Float(kernel),
        ];
        if args.full_loglik {
            row.push(Cell::Float(kernel + coeff));
        }
        table.push_row(row);
    };

    for kind in args.estimator.kinds() {
        match kind {
            EstimatorKind::Mle => {
                let r = mle(&x, design, &config).map_err(|e| CliError::Run(e.to_string()))?;
                let path = match r.path {
                    EstimatePath::ClosedForm => "closed_form",
                    EstimatePath::EmBoundary => "em_boundary",
                };
                push(
                    "mle",
                    &r.estimate,
                    path,
                    u64::from(r.iterations),
                    Some(r.on_boundary),
                    r.final_log_likelihood,
                );
            }
            EstimatorKind::Rmm => {
                let est = rmm(&x, design).map_err(|e| CliError::Run(e.to_string()))?;
                let kernel = log_likelihood(&est, &x, design, false)
                    .map_err(|e| CliError::Run(e.to_string()))?;
                push("rmm", &est, "closed_form", 0, None, kernel);
            }
            EstimatorKind::Burrows => {
                let est = burrows(&x, design).map_err(|e| CliError::Run(e.to_string()))?;
                let kernel = log_likelihood(&est, &x, design, false)
                    .map_err(|e| CliError::Run(e.to_string()))?;
                push("burrows", &est, "closed_form", 0, None, kernel);
            }
        }
    }

    let mut metadata = Metadata::new();
    metadata.push("command", "estimate");
    metadata.push("version", env!("CARGO_PKG_VERSION"));
    metadata.push("n", u64::from(args.n));
    metadata.push("k", u64::from(args.k));
    metadata.push("em_epsilon", args.epsilon);
    metadata.push("em_max_iterations", u64::from(args.max_iter));
    Ok((table, metadata))
}
