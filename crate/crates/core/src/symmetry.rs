//! Membership checks and canonical constructors for the PT-symmetric,
//! pseudo-Hermitian and generalized PT-symmetric classes.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PtError, Result};
use crate::involutions::{verify_involution, InvolutionKind, InvolutionOperator};
use crate::numerics::{eigen_decompose, ComplexMatrix, ToleranceConfig, I, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetryKind {
    /// `P·H = H*·P` with a real involution `P`.
    Pt,
    /// `P̃·H = H†·P̃` with a Hermitian involution `P̃`.
    Pseudo,
    /// `P̄·H* = H·P̄` with `P̄·P̄* = 1`.
    GenPt,
}

impl SymmetryKind {
    pub fn operator_kind(self) -> InvolutionKind {
        match self {
            SymmetryKind::Pt => InvolutionKind::RealInvolution,
            SymmetryKind::Pseudo => InvolutionKind::HermitianInvolution,
            SymmetryKind::GenPt => InvolutionKind::AntilinearCore,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub kind: SymmetryKind,
    pub holds: bool,
    /// `‖lhs − rhs‖_F` of the intertwining identity.
    pub residual: f64,
    /// `residual / ‖H‖_F`, or the plain residual when `H = 0`.
    pub relative_residual: f64,
    pub threshold: f64,
}

/// Intertwining residual `‖lhs − rhs‖_F` for `kind`, without validating `o`.
pub fn intertwining_residual(kind: SymmetryKind, o: &ComplexMatrix, h: &ComplexMatrix) -> f64 {
    match kind {
        SymmetryKind::Pt => (o * h).distance(&(&h.conj() * o)),
        SymmetryKind::Pseudo => (o * h).distance(&(&h.adjoint() * o)),
        SymmetryKind::GenPt => (o * &h.conj()).distance(&(h * o)),
    }
}

/// Checks the intertwining identity of `kind` for the operator `o`.
///
/// The operator is validated against the invariants `kind` requires
/// regardless of its tag, so the same diagonal parity can serve as `P0` and
/// `P̃0`. The verdict is `residual ≤ max(abs_tol, rel_tol·‖O‖·‖H‖)`.
pub fn check_symmetry(
    kind: SymmetryKind,
    o: &InvolutionOperator,
    h: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<SymmetryReport> {
    check_symmetry_matrix(kind, o.matrix(), h, tol)
}

/// [`check_symmetry`] on a bare operator matrix.
pub fn check_symmetry_matrix(
    kind: SymmetryKind,
    o: &ComplexMatrix,
    h: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<SymmetryReport> {
    let n = h.require_square("H")?;
    if o.nrows() != n || o.ncols() != n {
        return Err(PtError::Dimension(format!(
            "operator is {}x{} but H is {n}x{n}",
            o.nrows(),
            o.ncols()
        )));
    }
    let check = verify_involution(o, kind.operator_kind(), tol)?;
    if !check.holds {
        return Err(PtError::Contract(format!(
            "{kind:?} needs a {:?} operator (square residual {:.3e}, structure residual {:.3e})",
            kind.operator_kind(),
            check.square_residual,
            check.structure_residual
        )));
    }
    let residual = intertwining_residual(kind, o, h);
    let h_norm = h.frobenius_norm();
    let scale = o.frobenius_norm() * h_norm;
    Ok(SymmetryReport {
        kind,
        holds: tol.accepts(residual, scale),
        residual,
        relative_residual: if h_norm > 0.0 { residual / h_norm } else { residual },
        threshold: tol.abs_tol.max(tol.rel_tol * scale),
    })
}

fn real_block(m: &DMatrix<f64>) -> ComplexMatrix {
    ComplexMatrix::wrap(m.map(|x| Complex64::new(x, 0.0)))
}

fn require_shape(m: &DMatrix<f64>, rows: usize, cols: usize, name: &str) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(PtError::Dimension(format!(
            "block {name} must be {rows}x{cols}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(PtError::Numerical(format!("block {name} has non-finite entries")));
    }
    Ok(())
}

/// Real blocks of `[[A, iB], [iC, D]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PtBlockParams {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl PtBlockParams {
    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            a: DMatrix::zeros(m, m),
            b: DMatrix::zeros(m, n),
            c: DMatrix::zeros(n, m),
            d: DMatrix::zeros(n, n),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.a.nrows(), self.d.nrows())
    }
}

/// `[[A, iB], [iC, D]]`, PT-symmetric under `P0(m, n)`. Both `m` and `n`
/// must be positive.
pub fn construct_pt_block(p: &PtBlockParams) -> Result<ComplexMatrix> {
    let (m, n) = p.dims();
    if m == 0 || n == 0 {
        return Err(PtError::Dimension("block form needs m, n ≥ 1".into()));
    }
    require_shape(&p.a, m, m, "A")?;
    require_shape(&p.b, m, n, "B")?;
    require_shape(&p.c, n, m, "C")?;
    require_shape(&p.d, n, n, "D")?;
    ComplexMatrix::from_blocks(
        &real_block(&p.a),
        &real_block(&p.b).scale(I),
        &real_block(&p.c).scale(I),
        &real_block(&p.d),
    )
}

/// Blocks of `[[A, iB], [iB†, D]]` with `A`, `D` Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoBlockParams {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub d: ComplexMatrix,
}

/// `[[A, iB], [iB†, D]]`, pseudo-Hermitian under `P̃0(m, n)`.
pub fn construct_pseudo_block(p: &PseudoBlockParams, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let m = p.a.require_square("A")?;
    let n = p.d.require_square("D")?;
    if p.b.nrows() != m || p.b.ncols() != n {
        return Err(PtError::Dimension(format!(
            "block B must be {m}x{n}, got {}x{}",
            p.b.nrows(),
            p.b.ncols()
        )));
    }
    for (name, blk) in [("A", &p.a), ("D", &p.d)] {
        let r = blk.hermiticity_residual();
        if !tol.accepts(r, 0.0) {
            return Err(PtError::Contract(format!("block {name} is not Hermitian (residual {r:.3e})")));
        }
    }
    let ib = p.b.scale(I);
    ComplexMatrix::from_blocks(&p.a, &ib, &ib.adjoint().scale(-ONE), &p.d)
}

/// Data for the rotated Hermitian form `H̃_n`.
///
/// With 1-based indices, `a[i][j]` is read for `i + j ≤ n + 1` and `b[i][j]`
/// for `i + j ≤ n`; other entries are ignored. Entry `(i, j)` is
/// `a_ij + i·b_ij` and its skew-diagonal mirror `(n+1−j, n+1−i)` is
/// `a_ij − i·b_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatedHermitianParams {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl RotatedHermitianParams {
    pub fn zeros(n: usize) -> Self {
        Self {
            a: DMatrix::zeros(n, n),
            b: DMatrix::zeros(n, n),
        }
    }

    /// `a_ii = λ`, `a_{i,i+1} = 1`, everything else zero: yields `J_n(λ)`.
    pub fn jordan(n: usize, lambda: f64) -> Self {
        let mut p = Self::zeros(n);
        for i in 0..n {
            p.a[(i, i)] = lambda;
            if i + 1 < n {
                p.a[(i, i + 1)] = 1.0;
            }
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
}

pub fn construct_rotated_hermitian(p: &RotatedHermitianParams) -> Result<ComplexMatrix> {
    let n = p.dim();
    if n == 0 {
        return Err(PtError::Dimension("rotated Hermitian form needs n ≥ 1".into()));
    }
    require_shape(&p.a, n, n, "a")?;
    require_shape(&p.b, n, n, "b")?;
    let mut h = ComplexMatrix::zeros(n, n).into_dmatrix();
    for i in 0..n {
        for j in 0..n {
            if i + j > n - 1 {
                continue;
            }
            if i + j == n - 1 {
                h[(i, j)] = Complex64::new(p.a[(i, j)], 0.0);
            } else {
                let z = Complex64::new(p.a[(i, j)], p.b[(i, j)]);
                h[(i, j)] = z;
                h[(n - 1 - j, n - 1 - i)] = z.conj();
            }
        }
    }
    Ok(ComplexMatrix::wrap(h))
}

/// Phases `α_k` of `P̄0 = Diag{e^{iα_k}}` and the real moduli `r_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagPhaseGenPtParams {
    pub phases: Vec<f64>,
    pub r: DMatrix<f64>,
}

/// `H̄0_ij = r_ij·e^{i(α_i − α_j)/2}`.
pub fn construct_gen_pt_diag(p: &DiagPhaseGenPtParams) -> Result<ComplexMatrix> {
    let n = p.phases.len();
    if n == 0 {
        return Err(PtError::Dimension("need at least one phase".into()));
    }
    require_shape(&p.r, n, n, "r")?;
    if p.phases.iter().any(|a| !a.is_finite()) {
        return Err(PtError::Numerical("phases must be finite".into()));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        Complex64::from_polar(p.r[(i, j)], (p.phases[i] - p.phases[j]) / 2.0)
    }))
}

/// `P̄0 = Diag{e^{iα_k}}`.
pub fn diag_phase_operator(phases: &[f64]) -> ComplexMatrix {
    let d: Vec<Complex64> = phases.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
    ComplexMatrix::from_diagonal(&d)
}

/// Diagonal metric entries `ω_i` and real data `a_ij`, `b_ij`; the diagonal
/// and strict upper triangle of `a` and the strict upper triangle of `b` are
/// read.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagMetricSelfAdjointParams {
    pub omegas: Vec<f64>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

/// `H_D`, self-adjoint with respect to `W_D = Diag{ω}`.
pub fn construct_self_adjoint_from_diag_metric(p: &DiagMetricSelfAdjointParams) -> Result<ComplexMatrix> {
    let n = p.omegas.len();
    if n == 0 {
        return Err(PtError::Dimension("need at least one metric eigenvalue".into()));
    }
    if let Some(w) = p.omegas.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(PtError::Contract(format!("metric eigenvalues must be positive, got {w}")));
    }
    require_shape(&p.a, n, n, "a")?;
    require_shape(&p.b, n, n, "b")?;
    let w = &p.omegas;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(p.a[(i, i)], 0.0)
        } else {
            let (lo, hi) = (i.min(j), i.max(j));
            let z = Complex64::new(p.a[(lo, hi)], p.b[(lo, hi)]);
            let z = if i < j { z } else { z.conj() };
            z * (2.0 * w[j] / (w[i] + w[j]))
        }
    }))
}

/// `P̄ = X·(X⁻¹)*`, the generalized PT operator of `H = X·R·X⁻¹` for real `R`.
pub fn gen_pt_operator_from_similarity(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(x * &x.inverse()?.conj())
}

/// Outcome of [`find_gen_pt_operator`].
#[derive(Debug, Clone, PartialEq)]
pub enum GenPtSearch {
    Found {
        operator: InvolutionOperator,
        report: SymmetryReport,
    },
    /// The spectrum is not closed under conjugation.
    None { reason: String },
    /// Pairing or diagonalizability is ambiguous at the configured tolerance.
    Indeterminate { reason: String },
}

impl GenPtSearch {
    pub fn operator(&self) -> Option<&InvolutionOperator> {
        match self {
            GenPtSearch::Found { operator, .. } => Some(operator),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, GenPtSearch::Found { .. })
    }
}

/// Searches for `P̄` with `P̄·H* = H·P̄` by realifying a diagonalizable `H`.
///
/// Conjugate eigenvalues are paired greedily (smallest index first) within
/// `max(abs_tol, rel_tol·‖H‖)`; each pair `(v, w)` of eigenvectors becomes
/// `[v w]·M` with `M = (1/√2)[[1, −i], [1, i]]`, which turns the pair's
/// diagonal block into a real rotation block.
pub fn find_gen_pt_operator(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<GenPtSearch> {
    let n = h.require_square("H")?;
    let h_norm = h.frobenius_norm();
    let tau = tol.abs_tol.max(tol.rel_tol * h_norm);

    if h.imaginary_norm() <= tau {
        let op = InvolutionOperator::new(ComplexMatrix::identity(n), InvolutionKind::AntilinearCore, tol)?;
        let report = check_symmetry(SymmetryKind::GenPt, &op, h, tol)?;
        return Ok(GenPtSearch::Found { operator: op, report });
    }

    let eig = eigen_decompose(h, tol)?;
    let vals = &eig.values;
    let mut used = vec![false; n];
    let mut columns = Vec::with_capacity(n);
    let h2 = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..n {
        if used[k] {
            continue;
        }
        used[k] = true;
        let lam = vals[k];
        if lam.im.abs() <= tau {
            columns.push(eig.vectors.column(k));
            continue;
        }
        if lam.im.abs() <= 10.0 * tau {
            return Ok(GenPtSearch::Indeterminate {
                reason: format!("eigenvalue {lam} is within 10x tolerance of the real axis"),
            });
        }
        let target = lam.conj();
        let best = (0..n)
            .filter(|&j| !used[j])
            .map(|j| (j, (vals[j] - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        match best {
            Some((j, d)) if d <= tau => {
                used[j] = true;
                let v = eig.vectors.column(k);
                let w = eig.vectors.column(j);
                columns.push((&v + &w) * Complex64::new(h2, 0.0));
                columns.push((&w - &v) * Complex64::new(0.0, h2));
            }
            Some((_, d)) if d <= 10.0 * tau => {
                return Ok(GenPtSearch::Indeterminate {
                    reason: format!("conjugate partner of {lam} is ambiguous (distance {d:.3e})"),
                });
            }
            _ => {
                return Ok(GenPtSearch::None {
                    reason: format!("eigenvalue {lam} has no conjugate partner"),
                });
            }
        }
    }

    let x = ComplexMatrix::from_columns(&columns)?;
    let rcond = x.inverse_condition();
    if rcond <= f64::EPSILON.sqrt() {
        return Ok(GenPtSearch::Indeterminate {
            reason: format!("eigenvector basis is ill-conditioned (reciprocal condition {rcond:.3e}); H may be defective"),
        });
    }
    let pbar = gen_pt_operator_from_similarity(&x)?;
    let op = match InvolutionOperator::new(pbar, InvolutionKind::AntilinearCore, tol) {
        Ok(op) => op,
        Err(e) => return Ok(GenPtSearch::Indeterminate { reason: e.to_string() }),
    };
    let report = check_symmetry(SymmetryKind::GenPt, &op, h, tol)?;
    if report.holds {
        Ok(GenPtSearch::Found { operator: op, report })
    } else {
        Ok(GenPtSearch::Indeterminate {
            reason: format!("realified operator leaves residual {:.3e}", report.residual),
        })
    }
}
