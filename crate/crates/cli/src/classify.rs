use clap::ValueEnum;
use ptlab::involutions::InvolutionOperator;
use ptlab::io::MatrixDocument;
use ptlab::metric::{solve_metric_space_seeded, Positivity};
use ptlab::spectra::{classify_spectrum, SpectrumReport};
use ptlab::symmetry::{find_gen_pt_operator, GenPtSearch, SymmetryKind};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io::{fmt_f64, load_matrix, Table};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Pt,
    Pseudo,
    GenPt,
}

impl KindArg {
    pub fn symmetry(self) -> SymmetryKind {
        match self {
            KindArg::Pt => SymmetryKind::Pt,
            KindArg::Pseudo => SymmetryKind::Pseudo,
            KindArg::GenPt => SymmetryKind::GenPt,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Matrix document, `PATH` or `PATH#field`.
    #[arg(long)]
    matrix: String,
    /// Symmetry operator document.
    #[arg(long, requires = "kind")]
    operator: Option<String>,
    /// Symmetry class to check; `gen-pt` without an operator searches for one.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
}

#[derive(Debug, Serialize)]
struct MetricSummary {
    /// Real dimension of the Hermitian solutions of `WH = H†W`.
    dimension: usize,
    exists: bool,
    positivity: Positivity,
    min_eigenvalue_ratio: Option<f64>,
    metric: Option<MatrixDocument>,
}

#[derive(Debug, Serialize)]
struct GenPtSummary {
    status: &'static str,
    operator: Option<MatrixDocument>,
    reason: Option<String>,
}

#[derive(Debug, Serialize)]
struct ClassifyReport {
    dimension: usize,
    spectrum: SpectrumReport,
    metric: MetricSummary,
    gen_pt: GenPtSummary,
}

pub fn run(ctx: &Ctx, args: Args) -> CliResult<()> {
    let h = load_matrix(&args.matrix)?;
    h.require_square("matrix")?;
    let search = find_gen_pt_operator(&h, &ctx.tol)?;
    let operator = match (args.kind, &args.operator) {
        (Some(kind), Some(spec)) => {
            let m = load_matrix(spec)?;
            Some((kind, InvolutionOperator::new(m, kind.symmetry().operator_kind(), &ctx.tol)?))
        }
        (Some(KindArg::GenPt), None) => search.operator().map(|o| (KindArg::GenPt, o.clone())),
        (Some(kind), None) => {
            return Err(CliError::parse(format!("--kind {kind:?} needs --operator")));
        }
        (None, _) => None,
    };
    let spectrum = classify_spectrum(&h, &ctx.tol, operator.as_ref().map(|(k, o)| (k.symmetry(), o)))?;
    let sol = solve_metric_space_seeded(&h, &ctx.tol, ctx.seed)?;
    let gen_pt = match &search {
        GenPtSearch::Found { operator, .. } => GenPtSummary {
            status: "found",
            operator: Some(operator.matrix().into()),
            reason: None,
        },
        GenPtSearch::None { reason } => GenPtSummary {
            status: "none",
            operator: None,
            reason: Some(reason.clone()),
        },
        GenPtSearch::Indeterminate { reason } => GenPtSummary {
            status: "indeterminate",
            operator: None,
            reason: Some(reason.clone()),
        },
    };
    let report = ClassifyReport {
        dimension: h.nrows(),
        metric: MetricSummary {
            dimension: sol.dimension,
            exists: sol.positive_representative.is_some(),
            positivity: sol.positivity,
            min_eigenvalue_ratio: sol.min_eigenvalue_ratio,
            metric: sol.positive_representative.as_ref().map(Into::into),
        },
        spectrum,
        gen_pt,
    };
    ctx.sink.emit(&report, || {
        let mut t = Table::new(&["eigenvalue_re", "eigenvalue_im", "algebraic_multiplicity", "blocks"]);
        for s in &report.spectrum.segre {
            let blocks: Vec<String> = s.blocks.iter().map(|b| b.to_string()).collect();
            t.push(vec![
                fmt_f64(s.eigenvalue.re),
                fmt_f64(s.eigenvalue.im),
                s.algebraic_multiplicity.to_string(),
                blocks.join(";"),
            ]);
        }
        t
    })
}
