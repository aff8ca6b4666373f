use ptlab::counting::{table1_columns, table1_report_seeded, CountReport};
use serde::Serialize;

use crate::error::{CliError, CliResult, EXIT_MISMATCH};
use crate::io::Table;
use crate::Ctx;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Largest dimension, 2 to 8.
    #[arg(long)]
    max_dim: usize,
}

#[derive(Debug, Serialize)]
struct Column {
    dim: usize,
    /// Real symmetric, Hermitian, PT or pseudo-Hermitian, self-adjoint or
    /// generalized PT.
    values: [usize; 4],
}

#[derive(Debug, Serialize)]
struct CountOutput {
    all_match: bool,
    columns: Vec<Column>,
    rows: Vec<CountReport>,
}

pub fn run(ctx: &Ctx, args: Args) -> CliResult<()> {
    if !(2..=8).contains(&args.max_dim) {
        return Err(CliError::constraint(format!("2 ≤ max_dim ≤ 8 violated (got {})", args.max_dim)));
    }
    let rows = table1_report_seeded(args.max_dim, ctx.exec, &ctx.tol, ctx.seed)?;
    let columns = table1_columns(&rows)
        .into_iter()
        .map(|(dim, values)| Column { dim, values })
        .collect();
    let out = CountOutput {
        all_match: rows.iter().all(|r| r.matches),
        columns,
        rows,
    };
    ctx.sink.emit(&out, || {
        let mut t = Table::new(&CountReport::CSV_HEADER);
        for r in &out.rows {
            t.push(r.csv_record().to_vec());
        }
        t
    })?;
    mismatch(&out.rows)
}

fn mismatch(rows: &[CountReport]) -> CliResult<()> {
    let failing: Vec<String> = rows
        .iter()
        .filter(|r| !r.matches)
        .map(|r| format!("{} (m={}, n={}): {} ≠ {}", r.kind.name(), r.m, r.n, r.total, r.expected))
        .collect();
    if !failing.is_empty() {
        return Err(CliError::new(EXIT_MISMATCH, format!("count mismatch: {}", failing.join("; "))));
    }
    Ok(())
}
