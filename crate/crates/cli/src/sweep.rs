use clap::ValueEnum;
use num_complex::Complex64;
use ptlab::catalog::{pauli, pseudo2_h0, pt2_h0, Pt2Params};
use ptlab::exec::map_indexed;
use ptlab::involutions::{InvolutionKind, InvolutionOperator};
use ptlab::spectra::{classify_spectrum, degeneration_scan, DegenerationFamily, DegenerationScan, RealityClass};
use ptlab::symmetry::SymmetryKind;
use serde::{Deserialize, Serialize};

use crate::error::CliResult;
use crate::grid::GridSpec;
use crate::io::{fmt_f64, parse_params, Table};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFamily {
    /// Spectrum and PT verdict of `H0` over `(e, γ, ρ, δ)`.
    Pt2,
    /// Spectrum and pseudo-Hermitian verdict of `H̃0` over `(e, γ, ρ, δ)`.
    Pseudo2,
    /// Metric scan of `H0` towards the exceptional point.
    Pt2Degeneration,
    /// Metric scan of `H̃0` towards the exceptional point.
    Pseudo2Degeneration,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(value_enum)]
    family: SweepFamily,
    /// JSON object of grid specs, or `@PATH`. Each axis is a number, a list
    /// or `{start, stop, num, log}`.
    #[arg(long)]
    grid: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamGrid {
    e: Option<GridSpec>,
    gamma: Option<GridSpec>,
    rho: Option<GridSpec>,
    delta: Option<GridSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DegenerationGrid {
    u: Option<f64>,
    gamma: Option<f64>,
    epsilon: GridSpec,
}

#[derive(Debug, Serialize)]
struct SweepRow {
    e: f64,
    gamma: f64,
    rho: f64,
    delta: f64,
    eigenvalues: Vec<Complex64>,
    reality_class: RealityClass,
    unbroken: Option<bool>,
    defective: bool,
    indeterminate: bool,
}

#[derive(Debug, Serialize)]
struct SweepOutput {
    family: &'static str,
    rows: Vec<SweepRow>,
}

fn axis(spec: &Option<GridSpec>, default: f64, name: &str) -> CliResult<Vec<f64>> {
    match spec {
        Some(g) => g.values(name),
        None => Ok(vec![default]),
    }
}

fn param_sweep(ctx: &Ctx, family: SweepFamily, grid: ParamGrid) -> CliResult<()> {
    let es = axis(&grid.e, 0.0, "e")?;
    let gammas = axis(&grid.gamma, 1.0, "gamma")?;
    let rhos = axis(&grid.rho, 0.0, "rho")?;
    let deltas = axis(&grid.delta, 0.0, "delta")?;
    let mut points = Vec::with_capacity(es.len() * gammas.len() * rhos.len() * deltas.len());
    for &e in &es {
        for &g in &gammas {
            for &r in &rhos {
                for &d in &deltas {
                    points.push(Pt2Params::new(e, g, r, d));
                }
            }
        }
    }
    let (kind, inv, name) = match family {
        SweepFamily::Pt2 => (SymmetryKind::Pt, InvolutionKind::RealInvolution, "pt2"),
        _ => (SymmetryKind::Pseudo, InvolutionKind::HermitianInvolution, "pseudo2"),
    };
    let op = InvolutionOperator::new(pauli().sigma3, inv, &ctx.tol)?;
    let rows = map_indexed(ctx.exec, points.len(), |k| {
        let p = &points[k];
        let h = if family == SweepFamily::Pt2 { pt2_h0(p) } else { pseudo2_h0(p) };
        classify_spectrum(&h, &ctx.tol, Some((kind, &op))).map(|r| SweepRow {
            e: p.e,
            gamma: p.gamma,
            rho: p.rho,
            delta: p.delta,
            defective: r.is_defective(),
            eigenvalues: r.eigenvalues,
            reality_class: r.reality_class,
            unbroken: r.unbroken,
            indeterminate: r.indeterminate,
        })
    });
    let rows = rows.into_iter().collect::<ptlab::Result<Vec<_>>>()?;
    let out = SweepOutput { family: name, rows };
    ctx.sink.emit(&out, || {
        let mut t = Table::new(&[
            "e",
            "gamma",
            "rho",
            "delta",
            "lambda1_re",
            "lambda1_im",
            "lambda2_re",
            "lambda2_im",
            "reality_class",
            "unbroken",
            "defective",
            "indeterminate",
        ]);
        for r in &out.rows {
            let mut row = vec![fmt_f64(r.e), fmt_f64(r.gamma), fmt_f64(r.rho), fmt_f64(r.delta)];
            for z in &r.eigenvalues {
                row.push(fmt_f64(z.re));
                row.push(fmt_f64(z.im));
            }
            row.push(format!("{:?}", r.reality_class));
            row.push(r.unbroken.map_or(String::new(), |b| b.to_string()));
            row.push(r.defective.to_string());
            row.push(r.indeterminate.to_string());
            t.push(row);
        }
        t
    })
}

fn scan(ctx: &Ctx, family: DegenerationFamily, grid: DegenerationGrid) -> CliResult<()> {
    let mut eps = grid.epsilon.values("epsilon")?;
    eps.sort_by(|a, b| b.total_cmp(a));
    let s: DegenerationScan = degeneration_scan(grid.u.unwrap_or(1.0), grid.gamma.unwrap_or(1.0), &eps, family, ctx.exec)?;
    ctx.sink.emit(&s, || {
        let mut t = Table::new(&DegenerationScan::CSV_HEADER);
        for r in s.rows() {
            t.push(r.iter().map(|x| fmt_f64(*x)).collect());
        }
        t
    })
}

pub fn run(ctx: &Ctx, args: Args) -> CliResult<()> {
    match args.family {
        SweepFamily::Pt2 | SweepFamily::Pseudo2 => param_sweep(ctx, args.family, parse_params(&args.grid)?),
        SweepFamily::Pt2Degeneration => scan(ctx, DegenerationFamily::Pt2, parse_params(&args.grid)?),
        SweepFamily::Pseudo2Degeneration => scan(ctx, DegenerationFamily::Pseudo2, parse_params(&args.grid)?),
    }
}
