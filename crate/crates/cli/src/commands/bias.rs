use clap::{Args, ValueEnum};
use grouptest::asymptotics::{first_order_bias, BiasEstimator};

use crate::output::{Cell, Metadata, Table};
use crate::{CliError, CmdResult};

use super::{interior_prevalence, parse_triple};

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum BiasArg {
    /// Shared expansion of the MLE and the restricted method of moments
    MleRmm,
    /// Burrows shrinkage (unbiased to first order)
    Burrows,
    All,
}

#[derive(Args)]
pub struct BiasArgs {
    /// Prevalence p10,p01,p11 (strictly interior)
    #[arg(long, value_parser = parse_triple)]
    pub p: [f64; 3],

    /// Group size (units per pool)
    #[arg(long)]
    pub k: u32,

    /// Which expansion(s) to report
    #[arg(long, value_enum, default_value_t = BiasArg::All)]
    pub estimator: BiasArg,

    /// Also emit the bias approximation coeff/n for this pool count
    #[arg(long)]
    pub n: Option<u32>,
}

pub fn run(args: BiasArgs) -> CmdResult {
    let p = interior_prevalence(args.p)?;
    if args.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let kinds: Vec<(&str, BiasEstimator)> = match args.estimator {
        BiasArg::MleRmm => vec![("mle-rmm", BiasEstimator::MleRmm)],
        BiasArg::Burrows => vec![("burrows", BiasEstimator::Burrows)],
        BiasArg::All => vec![
            ("mle-rmm", BiasEstimator::MleRmm),
            ("burrows", BiasEstimator::Burrows),
        ],
    };

    let mut table = Table::new(&[
        "estimator",
        "k",
        "p10",
        "p01",
        "p11",
        "coeff_10",
        "coeff_01",
        "coeff_11",
        "n",
        "approx_bias_10",
        "approx_bias_01",
        "approx_bias_11",
    ]);
    for (name, kind) in kinds {
        let b = first_order_bias(&p, args.k, kind).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut row = vec![
            Cell::from(name),
            Cell::Int(u64::from(args.k)),
            Cell::Float(p.p10()),
            Cell::Float(p.p01()),
            Cell::Float(p.p11()),
        ];
        for c in b.components() {
            row.push(Cell::Float(c));
        }
        match args.n {
            Some(n) if n > 0 => {
                row.push(Cell::Int(u64::from(n)));
                for c in b.components() {
                    row.push(Cell::Float(c / f64::from(n)));
                }
            }
            Some(_) => return Err(CliError::Usage("--n must be at least 1".into())),
            None => {
                row.push(Cell::Str(String::new()));
                for _ in 0..3 {
                    row.push(Cell::OptFloat(None));
                }
            }
        }
        table.push_row(row);
    }

    let mut metadata = Metadata::new();
    metadata.push("command", "bias");
    metadata.push("version", env!("CARGO_PKG_VERSION"));
    metadata.push(
        "definition",
        "expected estimate = p + coeff/n + O(1/n^2), componentwise",
    );
    Ok((table, metadata))
}
