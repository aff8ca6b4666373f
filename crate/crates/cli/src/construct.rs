use std::collections::BTreeMap;

use clap::ValueEnum;
use nalgebra::DMatrix;
use num_complex::Complex64;
use ptlab::catalog::{
    cross_operators, genpt2_operator, pauli, pseudo2_family, pseudo2_jordan_chain, pt2_family, pt2_jordan_chain,
    pt2_transformed, CatalogChain, Chart, CrossCase, GenPt2Params, MetricBlock, Pt2Params,
};
use ptlab::involutions::{make_diagonal_parity, make_sip, verify_involution};
use ptlab::io::MatrixDocument;
use ptlab::metric::self_adjointness_residual;
use ptlab::numerics::{combine, nullspace_with, real_basis, real_matrix_of_map, CVector};
use ptlab::sampling::{normal_vec, rng_from_seed};
use ptlab::spectra::build_pt_jordan;
use ptlab::symmetry::{
    construct_gen_pt_diag, construct_pseudo_block, construct_pt_block, construct_rotated_hermitian,
    construct_self_adjoint_from_diag_metric, diag_phase_operator, intertwining_residual, DiagMetricSelfAdjointParams,
    DiagPhaseGenPtParams, PseudoBlockParams, PtBlockParams, RotatedHermitianParams, SymmetryKind,
};
use ptlab::ComplexMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::io::{params_value, Table};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// `H0` with `P = σ3` and metric `W0`.
    Pt2,
    /// `H1 = R1·H0·R1⁻¹` with `P1` and `W1`.
    Pt2R1,
    /// `H2 = R2·H0·R2⁻¹` with `P2` and `W2`.
    Pt2R2,
    /// `H̃(θ, φ) = U·H̃0·U†` with `P̃ = n^r·σ`.
    Pseudo2,
    /// The 2×2 generalized operator `P̄` and a matrix it commutes with.
    Genpt2,
    /// A closed-form cross operator and its target matrix.
    Cross,
    /// `[[A, iB], [iC, D]]` with real blocks.
    PtBlock,
    /// `[[A, iB], [iB†, D]]` with Hermitian `A`, `D`.
    PseudoBlock,
    /// PT-symmetric similarity of `J_m(λ) ⊕ J_n(λ)`.
    PtJordan,
    /// `H0` at the exceptional point with its chain.
    Pt2Jordan,
    /// `H̃0` at the exceptional point with its chain.
    Pseudo2Jordan,
    /// Generalized PT-symmetric matrix with a diagonal phase operator.
    GenPtDiag,
    /// Matrix self-adjoint under a diagonal metric.
    SelfAdjointDiag,
    /// Pseudo-Hermitian under the standard involutory permutation.
    RotatedHermitian,
    /// `J_n(λ)` with the standard involutory permutation.
    Sip,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(value_enum)]
    family: Family,
    /// JSON object, or `@PATH`.
    #[arg(long, default_value = "{}")]
    params: String,
}

#[derive(Debug, Serialize)]
struct Constructed {
    family: String,
    kind: Option<&'static str>,
    h: Option<MatrixDocument>,
    operator: Option<MatrixDocument>,
    metric: Option<MatrixDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metric_unavailable: Option<String>,
    residuals: BTreeMap<String, f64>,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

#[derive(Default)]
struct Parts {
    kind: Option<SymmetryKind>,
    self_adjoint: bool,
    h: Option<ComplexMatrix>,
    operator: Option<ComplexMatrix>,
    metric: Option<ComplexMatrix>,
    metric_unavailable: Option<String>,
    matrices: Vec<(String, ComplexMatrix)>,
    residuals: BTreeMap<String, f64>,
    values: BTreeMap<String, Value>,
}

fn kind_name(kind: SymmetryKind) -> &'static str {
    match kind {
        SymmetryKind::Pt => "pt",
        SymmetryKind::Pseudo => "pseudo",
        SymmetryKind::GenPt => "gen-pt",
    }
}

fn decode<T: for<'de> Deserialize<'de>>(v: Value) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError::parse(format!("invalid parameters: {e}")))
}

fn real_dmatrix(rows: &[Vec<f64>], name: &str) -> CliResult<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(CliError::parse(format!("block {name} has ragged rows")));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn complex_matrix(rows: &[Vec<[f64; 2]>], name: &str) -> CliResult<ComplexMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(CliError::parse(format!("block {name} has ragged rows")));
    }
    Ok(ComplexMatrix::from_fn(r, c, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

fn column(v: &CVector) -> ComplexMatrix {
    ComplexMatrix::from_fn(v.len(), 1, |i, _| v[i])
}

/// The metric was asked for explicitly when `u` or `v` is present.
fn metric_requested(v: &Value) -> bool {
    v.get("u").is_some() || v.get("v").is_some()
}

fn take_metric(parts: &mut Parts, block: MetricBlock<ComplexMatrix>, requested: bool) -> CliResult<()> {
    match block {
        MetricBlock::Available(w) => parts.metric = Some(w),
        MetricBlock::Unavailable { reason } => {
            if requested {
                return Err(CliError::constraint(reason));
            }
            parts.metric_unavailable = Some(reason);
        }
    }
    Ok(())
}

fn pt2(v: Value, chart: Option<Chart>) -> CliResult<Parts> {
    let requested = metric_requested(&v);
    let p: Pt2Params = decode(v)?;
    let mut parts = Parts {
        kind: Some(SymmetryKind::Pt),
        ..Parts::default()
    };
    match chart {
        None => {
            let f = pt2_family(&p)?;
            let block = match f.metric {
                MetricBlock::Available(m) => MetricBlock::Available(m.w),
                MetricBlock::Unavailable { reason } => MetricBlock::Unavailable { reason },
            };
            parts.h = Some(f.h);
            parts.operator = Some(pauli().sigma3);
            take_metric(&mut parts, block, requested)?;
            parts.values.insert("eigenvalues".into(), serde_json::json!([f.e_minus, f.e_plus]));
        }
        Some(chart) => {
            let t = pt2_transformed(chart, &p)?;
            parts.h = Some(t.h);
            parts.operator = Some(t.parity);
            parts.matrices.push(("r".into(), t.r));
            take_metric(&mut parts, t.w, requested)?;
        }
    }
    Ok(parts)
}

fn pseudo2(v: Value) -> CliResult<Parts> {
    let requested = metric_requested(&v);
    let p: Pt2Params = decode(v)?;
    let f = pseudo2_family(&p)?;
    let mut parts = Parts {
        kind: Some(SymmetryKind::Pseudo),
        h: Some(f.h),
        operator: Some(f.ptilde),
        ..Parts::default()
    };
    parts.matrices.push(("h0".into(), f.h0));
    parts.matrices.push(("u".into(), f.u));
    take_metric(&mut parts, f.w, requested)?;
    parts.values.insert("eigenvalues".into(), serde_json::json!([f.e_minus, f.e_plus]));
    Ok(parts)
}

/// A seeded member of the real-linear family `{H : P̄·H* = H·P̄}`.
fn gen_pt_member(pbar: &ComplexMatrix, ctx: &Ctx) -> CliResult<ComplexMatrix> {
    let n = pbar.nrows();
    let domain = real_basis(n, n);
    let l = real_matrix_of_map(&domain, |h| &(pbar * &h.conj()) - &(h * pbar));
    let null = nullspace_with(&l, |s| ctx.tol.rank_threshold(s)).nullspace;
    let members: Vec<ComplexMatrix> = null.iter().map(|v| combine(&domain, v.as_slice())).collect();
    if members.is_empty() {
        return Err(CliError::new(crate::error::EXIT_OTHER, "no matrix commutes with the operator"));
    }
    let coeffs = normal_vec(&mut rng_from_seed(ctx.seed), members.len());
    Ok(combine(&members, &coeffs))
}

#[derive(Deserialize)]
#[serde(rename_all = "kebab-case")]
enum CaseArg {
    PtildeForH0,
    PForHtilde0,
    Delta1,
    Delta2,
    Delta3,
}

fn cross(mut v: Value, ctx: &Ctx) -> CliResult<Parts> {
    let case = match v.as_object_mut().and_then(|o| o.remove("case")) {
        Some(c) => decode::<CaseArg>(c)?,
        None => return Err(CliError::parse("cross needs a \"case\" field")),
    };
    let case = match case {
        CaseArg::PtildeForH0 => CrossCase::PtildeForH0,
        CaseArg::PForHtilde0 => CrossCase::PForHtilde0,
        CaseArg::Delta1 => CrossCase::Delta1,
        CaseArg::Delta2 => CrossCase::Delta2,
        CaseArg::Delta3 => CrossCase::Delta3,
    };
    let p: Pt2Params = decode(v)?;
    let op = cross_operators(case, &p, &ctx.tol)?;
    Ok(Parts {
        kind: Some(if case.is_parity() { SymmetryKind::Pt } else { SymmetryKind::Pseudo }),
        h: Some(case.target(&p)?),
        operator: Some(op),
        ..Parts::default()
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PtBlockArgs {
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    c: Vec<Vec<f64>>,
    d: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PseudoBlockArgs {
    a: Vec<Vec<[f64; 2]>>,
    b: Vec<Vec<[f64; 2]>>,
    d: Vec<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PtJordanArgs {
    m: usize,
    n: usize,
    lambda: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainArgs {
    #[serde(default)]
    e: f64,
    gamma: f64,
    #[serde(default)]
    delta: f64,
    #[serde(default = "one")]
    n0: [f64; 2],
    #[serde(default)]
    alpha: [f64; 2],
}

fn one() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenPtDiagArgs {
    phases: Vec<f64>,
    r: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SelfAdjointArgs {
    omegas: Vec<f64>,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RotatedArgs {
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SipArgs {
    n: usize,
    #[serde(default)]
    lambda: f64,
}

fn chain_parts(ch: CatalogChain, kind: SymmetryKind) -> Parts {
    let shifted = &ch.h - &ComplexMatrix::identity(2).scale_real(ch.eigenvalue);
    let mut parts = Parts {
        kind: Some(kind),
        operator: Some(pauli().sigma3),
        ..Parts::default()
    };
    parts.residuals.insert("chain_0".into(), shifted.mul_vec(&ch.phi0).norm());
    parts.residuals.insert("chain_1".into(), (shifted.mul_vec(&ch.phi1) - &ch.phi0).norm());
    parts.matrices.push(("phi0".into(), column(&ch.phi0)));
    parts.matrices.push(("phi1".into(), column(&ch.phi1)));
    parts.values.insert("eigenvalue".into(), serde_json::json!(ch.eigenvalue));
    if let Some(l) = ch.pt_eigenvalue {
        parts.values.insert("pt_eigenvalue".into(), serde_json::json!(l));
    }
    parts.h = Some(ch.h);
    parts
}

fn build(family: Family, v: Value, ctx: &Ctx) -> CliResult<Parts> {
    if !v.is_object() {
        return Err(CliError::parse("parameters must be a JSON object"));
    }
    Ok(match family {
        Family::Pt2 => pt2(v, None)?,
        Family::Pt2R1 => pt2(v, Some(Chart::R1))?,
        Family::Pt2R2 => pt2(v, Some(Chart::R2))?,
        Family::Pseudo2 => pseudo2(v)?,
        Family::Genpt2 => {
            let p: GenPt2Params = decode(v)?;
            let op = genpt2_operator(&p)?;
            Parts {
                kind: Some(SymmetryKind::GenPt),
                h: Some(gen_pt_member(&op, ctx)?),
                operator: Some(op),
                ..Parts::default()
            }
        }
        Family::Cross => cross(v, ctx)?,
        Family::PtBlock => {
            let a: PtBlockArgs = decode(v)?;
            let p = PtBlockParams {
                a: real_dmatrix(&a.a, "a")?,
                b: real_dmatrix(&a.b, "b")?,
                c: real_dmatrix(&a.c, "c")?,
                d: real_dmatrix(&a.d, "d")?,
            };
            let (m, n) = p.dims();
            Parts {
                kind: Some(SymmetryKind::Pt),
                h: Some(construct_pt_block(&p)?),
                operator: Some(make_diagonal_parity(m, n)?.into_matrix()),
                ..Parts::default()
            }
        }
        Family::PseudoBlock => {
            let a: PseudoBlockArgs = decode(v)?;
            let p = PseudoBlockParams {
                a: complex_matrix(&a.a, "a")?,
                b: complex_matrix(&a.b, "b")?,
                d: complex_matrix(&a.d, "d")?,
            };
            let h = construct_pseudo_block(&p, &ctx.tol)?;
            Parts {
                kind: Some(SymmetryKind::Pseudo),
                h: Some(h),
                operator: Some(make_diagonal_parity(p.a.nrows(), p.d.nrows())?.into_matrix()),
                ..Parts::default()
            }
        }
        Family::PtJordan => {
            let a: PtJordanArgs = decode(v)?;
            let (h, lambda) = build_pt_jordan(a.m, a.n, a.lambda)?;
            let mut parts = Parts {
                kind: Some(SymmetryKind::Pt),
                h: Some(h),
                operator: Some(make_diagonal_parity(a.m, a.n)?.into_matrix()),
                ..Parts::default()
            };
            parts.matrices.push(("lambda".into(), lambda));
            parts
        }
        Family::Pt2Jordan | Family::Pseudo2Jordan => {
            let a: ChainArgs = decode(v)?;
            let n0 = Complex64::new(a.n0[0], a.n0[1]);
            let alpha = Complex64::new(a.alpha[0], a.alpha[1]);
            if family == Family::Pt2Jordan {
                chain_parts(pt2_jordan_chain(a.e, a.gamma, a.delta, n0, alpha)?, SymmetryKind::Pt)
            } else {
                chain_parts(pseudo2_jordan_chain(a.e, a.gamma, a.delta, n0, alpha)?, SymmetryKind::Pseudo)
            }
        }
        Family::GenPtDiag => {
            let a: GenPtDiagArgs = decode(v)?;
            let p = DiagPhaseGenPtParams {
                r: real_dmatrix(&a.r, "r")?,
                phases: a.phases,
            };
            Parts {
                kind: Some(SymmetryKind::GenPt),
                h: Some(construct_gen_pt_diag(&p)?),
                operator: Some(diag_phase_operator(&p.phases)),
                ..Parts::default()
            }
        }
        Family::SelfAdjointDiag => {
            let a: SelfAdjointArgs = decode(v)?;
            let p = DiagMetricSelfAdjointParams {
                a: real_dmatrix(&a.a, "a")?,
                b: real_dmatrix(&a.b, "b")?,
                omegas: a.omegas,
            };
            Parts {
                self_adjoint: true,
                h: Some(construct_self_adjoint_from_diag_metric(&p)?),
                metric: Some(ComplexMatrix::from_real_diagonal(&p.omegas)),
                ..Parts::default()
            }
        }
        Family::RotatedHermitian => {
            let a: RotatedArgs = decode(v)?;
            let p = RotatedHermitianParams {
                a: real_dmatrix(&a.a, "a")?,
                b: real_dmatrix(&a.b, "b")?,
            };
            Parts {
                kind: Some(SymmetryKind::Pseudo),
                h: Some(construct_rotated_hermitian(&p)?),
                operator: Some(make_sip(p.dim())?.into_matrix()),
                ..Parts::default()
            }
        }
        Family::Sip => {
            let a: SipArgs = decode(v)?;
            Parts {
                kind: Some(SymmetryKind::Pseudo),
                h: Some(construct_rotated_hermitian(&RotatedHermitianParams::jordan(a.n, a.lambda))?),
                operator: Some(make_sip(a.n)?.into_matrix()),
                ..Parts::default()
            }
        }
    })
}

pub fn run(ctx: &Ctx, args: Args) -> CliResult<()> {
    let v = params_value(&args.params)?;
    let mut parts = build(args.family, v, ctx)?;
    if let (Some(kind), Some(op), Some(h)) = (parts.kind, &parts.operator, &parts.h) {
        parts.residuals.insert("intertwining".into(), intertwining_residual(kind, op, h));
        let check = verify_involution(op, kind.operator_kind(), &ctx.tol)?;
        parts.residuals.insert("involution".into(), check.square_residual);
    }
    if let (Some(w), Some(h)) = (&parts.metric, &parts.h) {
        parts.residuals.insert("metric".into(), self_adjointness_residual(w, h)?);
    }
    let name = args.family.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default();
    let mut extra = parts.values.clone();
    for (k, m) in &parts.matrices {
        extra.insert(k.clone(), serde_json::to_value(MatrixDocument::from_matrix(m)).expect("matrix document"));
    }
    let out = Constructed {
        family: name,
        kind: match (parts.kind, parts.self_adjoint) {
            (Some(k), _) => Some(kind_name(k)),
            (None, true) => Some("self-adjoint"),
            _ => None,
        },
        h: parts.h.as_ref().map(Into::into),
        operator: parts.operator.as_ref().map(Into::into),
        metric: parts.metric.as_ref().map(Into::into),
        metric_unavailable: parts.metric_unavailable.clone(),
        residuals: parts.residuals.clone(),
        extra,
    };
    ctx.sink.emit(&out, || {
        let mut items: Vec<(&str, &ComplexMatrix)> = Vec::new();
        for (name, m) in [("h", &parts.h), ("operator", &parts.operator), ("metric", &parts.metric)] {
            if let Some(m) = m {
                items.push((name, m));
            }
        }
        for (k, m) in &parts.matrices {
            items.push((k.as_str(), m));
        }
        Table::matrices(items)
    })
}
