use clap::ValueEnum;
use ptlab::convert::{
    gen_pt_to_pseudo_seeded, pseudo_to_pt_seeded, pt_to_pseudo_seeded, ConversionResiduals, ConversionResult,
};
use ptlab::involutions::{InvolutionKind, InvolutionOperator};
use ptlab::io::MatrixDocument;
use serde::Serialize;

use crate::error::CliResult;
use crate::io::{load_matrix, Table};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    PtToPseudo,
    PseudoToPt,
    GenPtToPseudo,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(value_enum)]
    direction: Direction,
    /// Source symmetry operator document.
    #[arg(long)]
    operator: String,
    /// Matrix document.
    #[arg(long)]
    matrix: String,
}

#[derive(Debug, Serialize)]
struct ConvertOutput {
    direction: String,
    q: Option<MatrixDocument>,
    a: Option<MatrixDocument>,
    hermitian: bool,
    real: bool,
    involutory: bool,
    target_kind_satisfied: bool,
    residuals: Option<ConversionResiduals>,
    family_dimension: usize,
    degenerate: bool,
}

pub fn run(ctx: &Ctx, args: Args) -> CliResult<()> {
    let op = load_matrix(&args.operator)?;
    let h = load_matrix(&args.matrix)?;
    let kind = match args.direction {
        Direction::PtToPseudo => InvolutionKind::RealInvolution,
        Direction::PseudoToPt => InvolutionKind::HermitianInvolution,
        Direction::GenPtToPseudo => InvolutionKind::AntilinearCore,
    };
    let op = InvolutionOperator::new(op, kind, &ctx.tol)?;
    let r: ConversionResult = match args.direction {
        Direction::PtToPseudo => pt_to_pseudo_seeded(&op, &h, &ctx.tol, ctx.seed)?,
        Direction::PseudoToPt => pseudo_to_pt_seeded(&op, &h, &ctx.tol, ctx.seed)?,
        Direction::GenPtToPseudo => gen_pt_to_pseudo_seeded(&op, &h, &ctx.tol, ctx.seed)?,
    };
    let out = ConvertOutput {
        direction: args.direction.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default(),
        q: r.q.as_ref().map(Into::into),
        a: r.a.as_ref().map(Into::into),
        hermitian: r.hermitian,
        real: r.real,
        involutory: r.involutory,
        target_kind_satisfied: r.target_kind_satisfied,
        residuals: r.residuals,
        family_dimension: r.family_dimension,
        degenerate: r.degenerate,
    };
    ctx.sink.emit(&out, || {
        let mut items = Vec::new();
        if let Some(q) = &r.q {
            items.push(("q", q));
        }
        if let Some(a) = &r.a {
            items.push(("a", a));
        }
        Table::matrices(items)
    })
}
