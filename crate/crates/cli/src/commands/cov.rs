use clap::Args;
use grouptest::asymptotics::covariance_matrix;

use crate::output::{Cell, Metadata, Table};
use crate::{CliError, CmdResult};

use super::{interior_prevalence, parse_triple};

#[derive(Args)]
pub struct CovArgs {
    /// Prevalence p10,p01,p11 (strictly interior)
    #[arg(long, value_parser = parse_triple)]
    pub p: [f64; 3],

    /// Group size (units per pool)
    #[arg(long)]
    pub k: u32,

    /// Also emit the covariance scaled by 1/(n k^2) for this pool count
    #[arg(long)]
    pub n: Option<u32>,
}

pub fn run(args: CovArgs) -> CmdResult {
    let p = interior_prevalence(args.p)?;
    if args.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let cov = covariance_matrix(&p, args.k).map_err(|e| CliError::Usage(e.to_string()))?;
    let s = cov.distinct_entries();

    let mut table = Table::new(&[
        "k", "p10", "p01", "p11", "s11", "s21", "s22", "s31", "s32", "s33", "n", "c11", "c21",
        "c22", "c31", "c32", "c33",
    ]);
    let mut row = vec![
        Cell::Int(u64::from(args.k)),
        Cell::Float(p.p10()),
        Cell::Float(p.p01()),
        Cell::Float(p.p11()),
    ];
    for v in s {
        row.push(Cell::Float(v));
    }
    match args.n {
        Some(n) if n > 0 => {
            let scaled = cov.scaled(n);
            row.push(Cell::Int(u64::from(n)));
            for (i, j) in [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)] {
                row.push(Cell::Float(scaled[i][j]));
            }
        }
        Some(_) => return Err(CliError::Usage("--n must be at least 1".into())),
        None => {
            row.push(Cell::Str(String::new()));
            for _ in 0..6 {
                row.push(Cell::OptFloat(None));
            }
        }
    }
    table.push_row(row);

    let mut metadata = Metadata::new();
    metadata.push("command", "cov");
    metadata.push("version", env!("CARGO_PKG_VERSION"));
    metadata.push("component_order", "p10,p01,p11");
    Ok((table, metadata))
}
