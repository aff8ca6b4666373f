//! Transposing similarities `A·B·A⁻¹ = Bᵀ` and the conversions between
//! PT symmetry, pseudo-Hermiticity and generalized PT symmetry built on them.
//!
//! Each conversion parametrizes a real-linear family of candidates (the
//! transposer space cut down by the linear structure the target operator
//! needs) and then solves the quadratic conditions on that family by
//! Levenberg–Marquardt from seeded starts.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{PtError, Result};
use crate::involutions::{sip_matrix, InvolutionKind, InvolutionOperator};
use crate::numerics::{
    canonical_sign, combine, nullspace_with, real_basis, real_matrix_of_map, vectorize, ComplexMatrix,
    ToleranceConfig,
};
use crate::sampling::{normal_vec, rng_from_seed};
use crate::symmetry::{check_symmetry, check_symmetry_matrix, intertwining_residual, SymmetryKind};

pub const DEFAULT_CONVERT_SEED: u64 = 0x7A45_0002;
const DRAW_BUDGET: usize = 256;
const LM_ITERATIONS: usize = 100;
/// A draw with inverse condition above this ends the witness search early.
const GOOD_RCOND: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessMethod {
    Identity,
    NullspaceSearch,
    JordanRecipe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransposeWitness {
    pub a: ComplexMatrix,
    pub method: WitnessMethod,
    /// `‖A·B·A⁻¹ − Bᵀ‖_F`.
    pub residual: f64,
}

fn witness_residual(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(b.similarity(a)?.distance(&b.transpose()))
}

/// Real-linear family cut out by the stacked maps, as Frobenius-orthonormal
/// `n×n` complex matrices.
fn linear_family(n: usize, maps: &[&dyn Fn(&ComplexMatrix) -> ComplexMatrix], tol: &ToleranceConfig) -> Vec<ComplexMatrix> {
    let domain = real_basis(n, n);
    let blocks: Vec<DMatrix<f64>> = maps.iter().map(|f| real_matrix_of_map(&domain, f)).collect();
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut l = DMatrix::zeros(rows, domain.len());
    let mut r0 = 0;
    for b in &blocks {
        l.view_mut((r0, 0), b.shape()).copy_from(b);
        r0 += b.nrows();
    }
    let ns = nullspace_with(&l, |smax| tol.rank_threshold(smax).max(tol.abs_tol * smax));
    ns.nullspace.iter().map(|v| combine(&domain, v.as_slice())).collect()
}

fn transposer_map(b: &ComplexMatrix) -> impl Fn(&ComplexMatrix) -> ComplexMatrix + '_ {
    let s = 1.0 / b.frobenius_norm().max(1.0);
    let bt = b.transpose();
    move |a: &ComplexMatrix| (&(a * b) - &(&bt * a)).scale_real(s)
}

/// Real basis of `{A : A·B = Bᵀ·A}`.
pub fn transposer_space(b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Vec<ComplexMatrix>> {
    let n = b.require_square("B")?;
    let f = transposer_map(b);
    Ok(linear_family(n, &[&f], tol))
}

pub fn transpose_matrix(b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<TransposeWitness> {
    transpose_matrix_seeded(b, tol, DEFAULT_CONVERT_SEED)
}

/// An invertible `A` with `A·B·A⁻¹ = Bᵀ`.
///
/// Symmetric `B` gets the identity. Otherwise random combinations of the
/// transposer space are drawn and the best conditioned one is kept.
pub fn transpose_matrix_seeded(b: &ComplexMatrix, tol: &ToleranceConfig, seed: u64) -> Result<TransposeWitness> {
    let n = b.require_square("B")?;
    if tol.accepts(b.distance(&b.transpose()), b.frobenius_norm()) {
        let a = ComplexMatrix::identity(n);
        let residual = witness_residual(&a, b)?;
        return Ok(TransposeWitness {
            a,
            method: WitnessMethod::Identity,
            residual,
        });
    }
    let basis = transposer_space(b, tol)?;
    if basis.is_empty() {
        return Err(PtError::Numerical("transposer space is empty; this is a bug".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut best: Option<(ComplexMatrix, f64)> = None;
    for _ in 0..DRAW_BUDGET {
        let a = combine(&basis, &normal_vec(&mut rng, basis.len()));
        let rc = a.inverse_condition();
        if best.as_ref().is_none_or(|(_, r)| rc > *r) {
            best = Some((a, rc));
        }
        if rc >= GOOD_RCOND {
            break;
        }
    }
    let (a, rc) = best.expect("budget ≥ 1");
    if rc <= f64::EPSILON * n as f64 {
        return Err(PtError::Numerical(format!(
            "no invertible transposer in {DRAW_BUDGET} draws (best inverse condition {rc:.3e})"
        )));
    }
    let a = a.scale_real(1.0 / a.frobenius_norm());
    let residual = witness_residual(&a, b)?;
    Ok(TransposeWitness {
        a,
        method: WitnessMethod::NullspaceSearch,
        residual,
    })
}

/// `A = Fᵀ·(S_{m1} ⊕ S_{m2} ⊕ …)·F` for a known `F` with
/// `F·B·F⁻¹ = J_{m1}(λ1) ⊕ J_{m2}(λ2) ⊕ …`.
pub fn transpose_from_jordan(b: &ComplexMatrix, f: &ComplexMatrix, block_sizes: &[usize]) -> Result<TransposeWitness> {
    let n = b.require_square("B")?;
    f.require_same_shape(b, "transpose_from_jordan")?;
    if block_sizes.iter().sum::<usize>() != n || block_sizes.contains(&0) {
        return Err(PtError::Dimension(format!("block sizes {block_sizes:?} do not partition {n}")));
    }
    let s = ComplexMatrix::direct_sum(&block_sizes.iter().map(|&k| sip_matrix(k)).collect::<Vec<_>>());
    let a = &(&f.transpose() * &s) * f;
    let residual = witness_residual(&a, b)?;
    Ok(TransposeWitness {
        a,
        method: WitnessMethod::JordanRecipe,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionResiduals {
    /// `‖Q − Q†‖` (Hermitian targets) or `‖Q − Q*‖` (real targets).
    pub structure: f64,
    pub involution: f64,
    pub intertwining: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConversionResult {
    pub q: Option<ComplexMatrix>,
    /// The transposer `A_H` the operator was built from, when invertible.
    pub a: Option<ComplexMatrix>,
    pub hermitian: bool,
    pub real: bool,
    pub involutory: bool,
    pub target_kind_satisfied: bool,
    pub residuals: Option<ConversionResiduals>,
    /// Real dimension of the searched linear family.
    pub family_dimension: usize,
    /// The family only holds operators with `Q² ≈ 0`: the normalization of
    /// an involution is singular.
    pub degenerate: bool,
}

impl ConversionResult {
    fn empty(family_dimension: usize, degenerate: bool) -> Self {
        ConversionResult {
            q: None,
            a: None,
            hermitian: false,
            real: false,
            involutory: false,
            target_kind_satisfied: false,
            residuals: None,
            family_dimension,
            degenerate,
        }
    }
}

/// Finite-difference Levenberg–Marquardt on `r(c) = 0`. The residuals used
/// here are quadratic in `c`, for which central differences are exact.
fn levenberg_marquardt(
    c0: Vec<f64>,
    r: &dyn Fn(&[f64]) -> DVector<f64>,
    target: f64,
) -> (Vec<f64>, f64) {
    let d = c0.len();
    let mut c = c0;
    let mut rc = r(&c);
    let mut mu = 1e-3;
    for _ in 0..LM_ITERATIONS {
        let norm = rc.norm();
        if norm <= target {
            break;
        }
        let h = 1e-3;
        let mut jac = DMatrix::zeros(rc.len(), d);
        for k in 0..d {
            let mut cp = c.clone();
            let mut cm = c.clone();
            cp[k] += h;
            cm[k] -= h;
            let col = (r(&cp) - r(&cm)) / (2.0 * h);
            jac.set_column(k, &col);
        }
        let jt = jac.transpose();
        let g = &jt * &rc;
        let jtj = &jt * &jac;
        let mut improved = false;
        for _ in 0..12 {
            let mut m = jtj.clone();
            for k in 0..d {
                m[(k, k)] += mu * (1.0 + jtj[(k, k)]);
            }
            let Some(step) = m.lu().solve(&(-&g)) else {
                mu *= 10.0;
                continue;
            };
            let trial: Vec<f64> = c.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let rt = r(&trial);
            if rt.norm() < norm {
                c = trial;
                rc = rt;
                mu = (mu / 3.0).max(1e-12);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    let n = rc.norm();
    (c, n)
}

fn square_minus_identity(q: &ComplexMatrix) -> ComplexMatrix {
    &(q * q) - &ComplexMatrix::identity(q.dim())
}

/// Searches coefficients `c` over `family` for `residual(c) = 0` from up to
/// [`DRAW_BUDGET`] seeded starts.
fn solve_on_family(
    family_dim: usize,
    residual: &dyn Fn(&[f64]) -> DVector<f64>,
    accept: &dyn Fn(&[f64]) -> bool,
    seed: u64,
) -> Option<Vec<f64>> {
    if family_dim == 0 {
        return None;
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..DRAW_BUDGET {
        let c0 = normal_vec(&mut rng, family_dim);
        let (c, _) = levenberg_marquardt(c0, residual, 1e-14);
        if accept(&c) {
            return Some(c);
        }
    }
    None
}

fn involutory(q: &ComplexMatrix, tol: &ToleranceConfig) -> (f64, bool) {
    let r = square_minus_identity(q).frobenius_norm();
    (r, tol.accepts(r, q.frobenius_norm().powi(2)))
}

/// Every sampled member of the family squares to (numerically) zero.
fn nilpotent_family(family: &[ComplexMatrix], seed: u64) -> bool {
    if family.is_empty() {
        return false;
    }
    let mut rng = rng_from_seed(seed ^ 0xD06);
    (0..16).all(|_| {
        let q = combine(family, &normal_vec(&mut rng, family.len()));
        (&q * &q).frobenius_norm() <= 1e-8 * q.frobenius_norm().powi(2)
    })
}

fn fix_sign_if_traceless(q: ComplexMatrix) -> ComplexMatrix {
    if q.trace().norm() <= 1e-9 * q.frobenius_norm() {
        canonical_sign(&q)
    } else {
        q
    }
}

fn require_holds(kind: SymmetryKind, o: &InvolutionOperator, h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<()> {
    let r = check_symmetry(kind, o, h, tol)?;
    if !r.holds {
        return Err(PtError::Contract(format!(
            "source symmetry {kind:?} does not hold (residual {:.3e})",
            r.residual
        )));
    }
    Ok(())
}

fn finish(
    q: ComplexMatrix,
    a: Option<ComplexMatrix>,
    target: SymmetryKind,
    h: &ComplexMatrix,
    family_dimension: usize,
    tol: &ToleranceConfig,
) -> ConversionResult {
    let scale = q.frobenius_norm();
    let herm_res = q.hermiticity_residual();
    let real_res = q.imaginary_norm();
    let hermitian = tol.accepts(herm_res, scale);
    let real = tol.accepts(real_res, scale);
    let (inv_res, involutory) = involutory(&q, tol);
    let intertwining = intertwining_residual(target, &q, h);
    let structure = match target {
        SymmetryKind::Pt => real_res,
        _ => herm_res,
    };
    let target_kind_satisfied = check_symmetry_matrix(target, &q, h, tol).map(|r| r.holds).unwrap_or(false);
    ConversionResult {
        q: Some(q),
        a,
        hermitian,
        real,
        involutory,
        target_kind_satisfied,
        residuals: Some(ConversionResiduals {
            structure,
            involution: inv_res,
            intertwining,
        }),
        family_dimension,
        degenerate: false,
    }
}

fn quadratic_residual(
    family: &[ComplexMatrix],
    trace_target: Option<f64>,
) -> impl Fn(&[f64]) -> DVector<f64> + '_ {
    move |c: &[f64]| {
        let q = combine(family, c);
        let mut v = vectorize(&square_minus_identity(&q)).as_slice().to_vec();
        if let Some(t) = trace_target {
            v.push(q.trace().re - t);
        }
        DVector::from_vec(v)
    }
}

fn solve_involution(
    family: &[ComplexMatrix],
    trace_target: Option<f64>,
    tol: &ToleranceConfig,
    seed: u64,
) -> Option<ComplexMatrix> {
    let accept = |c: &[f64]| involutory(&combine(family, c), tol).1;
    let mut targets = vec![trace_target];
    if trace_target.is_some() {
        targets.push(None);
    }
    targets.into_iter().find_map(|t| {
        let r = quadratic_residual(family, t);
        solve_on_family(family.len(), &r, &accept, seed).map(|c| combine(family, &c))
    })
}

fn signature_trace(o: &InvolutionOperator) -> Option<f64> {
    o.signature().map(|(m, n)| m as f64 - n as f64)
}

pub fn pt_to_pseudo(p: &InvolutionOperator, h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ConversionResult> {
    pt_to_pseudo_seeded(p, h, tol, DEFAULT_CONVERT_SEED)
}

/// A Hermitian involution `Q = A_H*·P` making `H` `Q`-pseudo-Hermitian.
pub fn pt_to_pseudo_seeded(
    p: &InvolutionOperator,
    h: &ComplexMatrix,
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<ConversionResult> {
    require_holds(SymmetryKind::Pt, p, h, tol)?;
    let n = h.dim();
    let pm = p.matrix();
    let a_of = |q: &ComplexMatrix| (q * pm).conj();
    if check_symmetry_matrix(SymmetryKind::Pseudo, pm, h, tol).is_ok_and(|r| r.holds) {
        return Ok(finish(pm.clone(), Some(a_of(pm)), SymmetryKind::Pseudo, h, n * n, tol));
    }
    let t = transposer_map(h);
    let herm = |a: &ComplexMatrix| {
        let q = &a.conj() * pm;
        &q - &q.adjoint()
    };
    let family_a = linear_family(n, &[&t, &herm], tol);
    let family: Vec<ComplexMatrix> = family_a.iter().map(|a| &a.conj() * pm).collect();
    match solve_involution(&family, signature_trace(p), tol, seed) {
        Some(q) => {
            let q = fix_sign_if_traceless(q.hermitian_part());
            let a = a_of(&q);
            Ok(finish(q, Some(a), SymmetryKind::Pseudo, h, family.len(), tol))
        }
        None => Ok(ConversionResult::empty(family.len(), nilpotent_family(&family, seed))),
    }
}

pub fn pseudo_to_pt(pt: &InvolutionOperator, h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ConversionResult> {
    pseudo_to_pt_seeded(pt, h, tol, DEFAULT_CONVERT_SEED)
}

/// A real involution `Q = (A_H*)⁻¹·P̃` with `Q·H = H*·Q`.
///
/// `G = (A_H*)⁻¹` ranges over `{G : G·H† = H*·G}` with `G·P̃` real.
pub fn pseudo_to_pt_seeded(
    pt: &InvolutionOperator,
    h: &ComplexMatrix,
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<ConversionResult> {
    require_holds(SymmetryKind::Pseudo, pt, h, tol)?;
    let n = h.dim();
    let pm = pt.matrix();
    let a_of = |q: &ComplexMatrix| (q * pm).conj().inverse().ok();
    if check_symmetry_matrix(SymmetryKind::Pt, pm, h, tol).is_ok_and(|r| r.holds) {
        return Ok(finish(pm.clone(), a_of(pm), SymmetryKind::Pt, h, n * n, tol));
    }
    let s = 1.0 / h.frobenius_norm().max(1.0);
    let (ha, hc) = (h.adjoint(), h.conj());
    let intertwine = |g: &ComplexMatrix| (&(g * &ha) - &(&hc * g)).scale_real(s);
    let real = |g: &ComplexMatrix| {
        let q = g * pm;
        &q - &q.conj()
    };
    let family_g = linear_family(n, &[&intertwine, &real], tol);
    let family: Vec<ComplexMatrix> = family_g.iter().map(|g| ComplexMatrix::from_real(&(g * pm).real_part()).expect("finite")).collect();
    match solve_involution(&family, signature_trace(pt), tol, seed) {
        Some(q) => {
            let q = fix_sign_if_traceless(ComplexMatrix::from_real(&q.real_part()).expect("finite"));
            let a = a_of(&q);
            Ok(finish(q, a, SymmetryKind::Pt, h, family.len(), tol))
        }
        None => Ok(ConversionResult::empty(family.len(), nilpotent_family(&family, seed))),
    }
}

pub fn gen_pt_to_pseudo(pbar: &InvolutionOperator, h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ConversionResult> {
    gen_pt_to_pseudo_seeded(pbar, h, tol, DEFAULT_CONVERT_SEED)
}

/// `Q = P̄·A_H` over transposers with `A_H·A_H* = 1` and `Q` Hermitian;
/// involution is sought on top and reported.
pub fn gen_pt_to_pseudo_seeded(
    pbar: &InvolutionOperator,
    h: &ComplexMatrix,
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<ConversionResult> {
    if pbar.kind() != InvolutionKind::AntilinearCore {
        // a real or Hermitian involution also satisfies P̄P̄* = 1 when real
        pbar.as_kind(InvolutionKind::AntilinearCore, tol)?;
    }
    require_holds(SymmetryKind::GenPt, pbar, h, tol)?;
    let n = h.dim();
    let pm = pbar.matrix();
    let id = ComplexMatrix::identity(n);
    let t = transposer_map(h);
    let herm = |a: &ComplexMatrix| {
        let q = pm * a;
        &q - &q.adjoint()
    };
    let family_a = linear_family(n, &[&t, &herm], tol);
    let d = family_a.len();
    let unitary_like = |a: &ComplexMatrix| tol.accepts((a * &a.conj()).distance(&id), a.frobenius_norm().powi(2));

    if tol.accepts(h.distance(&h.transpose()), h.frobenius_norm()) {
        let (_, inv) = involutory(pm, tol);
        if inv && tol.accepts(pm.hermiticity_residual(), pm.frobenius_norm()) {
            return Ok(finish(pm.clone(), Some(id), SymmetryKind::Pseudo, h, d, tol));
        }
    }

    let both = |c: &[f64]| {
        let a = combine(&family_a, c);
        let q = pm * &a;
        let mut v = vectorize(&(&(&a * &a.conj()) - &id)).as_slice().to_vec();
        v.extend_from_slice(vectorize(&square_minus_identity(&q)).as_slice());
        DVector::from_vec(v)
    };
    let only_a = |c: &[f64]| {
        let a = combine(&family_a, c);
        DVector::from_vec(vectorize(&(&(&a * &a.conj()) - &id)).as_slice().to_vec())
    };
    let accept_both = |c: &[f64]| {
        let a = combine(&family_a, c);
        unitary_like(&a) && involutory(&(pm * &a), tol).1
    };
    let accept_a = |c: &[f64]| unitary_like(&combine(&family_a, c));
    let found = solve_on_family(d, &both, &accept_both, seed).or_else(|| solve_on_family(d, &only_a, &accept_a, seed));
    match found {
        Some(c) => {
            let a = combine(&family_a, &c);
            let q = (pm * &a).hermitian_part();
            let (q, a) = if q.trace().norm() <= 1e-9 * q.frobenius_norm() && canonical_sign(&q) != q {
                (-&q, -&a)
            } else {
                (q, a)
            };
            Ok(finish(q, Some(a), SymmetryKind::Pseudo, h, d, tol))
        }
        None => Ok(ConversionResult::empty(d, false)),
    }
}
