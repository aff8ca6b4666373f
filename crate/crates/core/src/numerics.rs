//! Dense complex matrix arithmetic and the rank, eigen and nullspace kernels
//! consumed by every other module.
//!
//! Matrices in scope are desk scale (at most 64×64), so everything is dense
//! and built on `nalgebra`. [`ComplexMatrix`] wraps a `DMatrix<Complex64>` and
//! guarantees finite entries at every public construction boundary.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PtError, Result};

/// Complex column vector.
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

const SCHUR_MAX_ITER: usize = 10_000;

/// Tolerances used for every verdict in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Multiplies `σ_max · ε_machine` to give the rank cutoff.
    pub rank_tol_factor: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            rank_tol_factor: 64.0,
        }
    }
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, rank_tol_factor: f64) -> Result<Self> {
        let cfg = Self {
            abs_tol,
            rel_tol,
            rank_tol_factor,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("rank_tol_factor", self.rank_tol_factor),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(PtError::Constraint(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Singular values at or below this are treated as zero.
    pub fn rank_threshold(&self, sigma_max: f64) -> f64 {
        self.rank_tol_factor * sigma_max * f64::EPSILON
    }

    /// The single acceptance rule for residuals: `residual ≤ max(abs_tol, rel_tol·scale)`.
    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual <= self.abs_tol.max(self.rel_tol * scale)
    }
}

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn check_finite<'a>(entries: impl IntoIterator<Item = &'a Complex64>) -> Result<()> {
    if entries.into_iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(PtError::Numerical("matrix has non-finite entries".into()))
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_rows(n_rows: usize, n_cols: usize, entries: &[Complex64]) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(PtError::Dimension("matrix dimensions must be positive".into()));
        }
        if entries.len() != n_rows * n_cols {
            return Err(PtError::Dimension(format!(
                "expected {} entries for a {n_rows}x{n_cols} matrix, got {}",
                n_rows * n_cols,
                entries.len()
            )));
        }
        check_finite(entries)?;
        Ok(Self(DMatrix::from_row_slice(n_rows, n_cols, entries)))
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real_rows(n_rows: usize, n_cols: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_rows(n_rows, n_cols, &c)
    }

    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(PtError::Dimension("matrix dimensions must be positive".into()));
        }
        check_finite(m.iter())?;
        Ok(Self(m))
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::from_dmatrix(m.map(|x| Complex64::new(x, 0.0)))
    }

    /// Internal constructor for results of arithmetic on already-valid matrices.
    pub(crate) fn wrap(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(n_rows, n_cols, f))
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self(DMatrix::zeros(n_rows, n_cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let c: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&c)
    }

    /// `J_n(λ)`: λ on the diagonal, ones on the first superdiagonal.
    pub fn jordan_block(n: usize, lambda: Complex64) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                lambda
            } else if j == i + 1 {
                ONE
            } else {
                ZERO
            }
        })
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.nrows() != b.nrows() || c.nrows() != d.nrows() || a.ncols() != c.ncols() || b.ncols() != d.ncols() {
            return Err(PtError::Dimension("inconsistent block shapes".into()));
        }
        let (m, n) = (a.nrows(), c.nrows());
        let (p, q) = (a.ncols(), b.ncols());
        let mut out = DMatrix::zeros(m + n, p + q);
        out.view_mut((0, 0), (m, p)).copy_from(&a.0);
        out.view_mut((0, p), (m, q)).copy_from(&b.0);
        out.view_mut((m, 0), (n, p)).copy_from(&c.0);
        out.view_mut((m, p), (n, q)).copy_from(&d.0);
        Ok(Self(out))
    }

    pub fn direct_sum(blocks: &[Self]) -> Self {
        let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
        let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(&b.0);
            r += b.nrows();
            c += b.ncols();
        }
        Self(out)
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.0.nrows() == self.0.ncols()
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.nrows() * self.ncols());
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> CVector {
        self.0.column(j).into_owned()
    }

    pub fn from_columns(cols: &[CVector]) -> Result<Self> {
        if cols.is_empty() {
            return Err(PtError::Dimension("no columns".into()));
        }
        Self::from_dmatrix(DMatrix::from_columns(cols))
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.0.map(|z| z.re)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        &self.0 * v
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }

    /// `‖M − conj(M)‖_F`.
    pub fn imaginary_norm(&self) -> f64 {
        2.0 * self.0.iter().map(|z| z.im * z.im).sum::<f64>().sqrt()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.distance(&self.adjoint())
    }

    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    pub fn powi(&self, k: u32) -> Self {
        let n = self.nrows();
        let mut acc = Self::identity(n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn require_square(&self, what: &str) -> Result<usize> {
        if self.is_square() {
            Ok(self.nrows())
        } else {
            Err(PtError::Dimension(format!(
                "{what} must be square, got {}x{}",
                self.nrows(),
                self.ncols()
            )))
        }
    }

    pub fn require_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.nrows() == other.nrows() && self.ncols() == other.ncols() {
            Ok(())
        } else {
            Err(PtError::Dimension(format!(
                "{what}: shape {}x{} does not match {}x{}",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )))
        }
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let svd = SVD::new(self.0.clone(), false, false);
        let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// `σ_min / σ_max`, zero for the zero matrix.
    pub fn inverse_condition(&self) -> f64 {
        let s = self.singular_values();
        match (s.first(), s.last()) {
            (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
            _ => 0.0,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.require_square("matrix to invert")?;
        let rcond = self.inverse_condition();
        if rcond <= 64.0 * f64::EPSILON * n as f64 {
            return Err(PtError::Numerical(format!(
                "matrix is numerically singular (reciprocal condition {rcond:.3e})"
            )));
        }
        self.0
            .clone()
            .try_inverse()
            .map(Self)
            .ok_or_else(|| PtError::Numerical("LU inversion failed".into()))
    }

    /// `T · self · T⁻¹`.
    pub fn similarity(&self, t: &Self) -> Result<Self> {
        let t_inv = t.inverse()?;
        Ok(&(t * self) * &t_inv)
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a, 'b> $trait<&'b ComplexMatrix> for &'a ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &'b ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op rhs.0)
            }
        }
        impl<'b> $trait<&'b ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &'b ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op &rhs.0)
            }
        }
        impl<'a> $trait<ComplexMatrix> for &'a ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op rhs.0)
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

// ── real vectorization ──────────────────────────────────────────────

/// Interleaved `(Re, Im)` per entry, row-major: the `2·r·c` real coordinates
/// of a complex `r×c` matrix.
pub fn vectorize(m: &ComplexMatrix) -> DVector<f64> {
    let mut out = Vec::with_capacity(2 * m.nrows() * m.ncols());
    for z in m.row_major() {
        out.push(z.re);
        out.push(z.im);
    }
    DVector::from_vec(out)
}

/// Inverse of [`vectorize`].
pub fn devectorize(n_rows: usize, n_cols: usize, v: &[f64]) -> Result<ComplexMatrix> {
    if v.len() != 2 * n_rows * n_cols {
        return Err(PtError::Dimension(format!(
            "real vector of length {} cannot hold a {n_rows}x{n_cols} complex matrix",
            v.len()
        )));
    }
    let entries: Vec<Complex64> = v.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
    ComplexMatrix::from_rows(n_rows, n_cols, &entries)
}

/// The standard real basis of `r×c` complex matrices, ordered like [`vectorize`].
pub fn real_basis(n_rows: usize, n_cols: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(2 * n_rows * n_cols);
    for i in 0..n_rows {
        for j in 0..n_cols {
            for unit in [ONE, I] {
                let mut m = ComplexMatrix::zeros(n_rows, n_cols);
                m.0[(i, j)] = unit;
                out.push(m);
            }
        }
    }
    out
}

/// Real basis of the `n²`-dimensional space of `n×n` Hermitian matrices.
pub fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in i..n {
            if i == j {
                let mut m = ComplexMatrix::zeros(n, n);
                m.0[(i, i)] = ONE;
                out.push(m);
            } else {
                let mut re = ComplexMatrix::zeros(n, n);
                re.0[(i, j)] = ONE;
                re.0[(j, i)] = ONE;
                out.push(re);
                let mut im = ComplexMatrix::zeros(n, n);
                im.0[(i, j)] = I;
                im.0[(j, i)] = -I;
                out.push(im);
            }
        }
    }
    out
}

/// Real matrix of a real-linear map, with columns `vectorize(f(b))` for each
/// domain basis element `b`.
pub fn real_matrix_of_map(
    domain: &[ComplexMatrix],
    f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = domain.iter().map(|b| vectorize(&f(b))).collect();
    DMatrix::from_columns(&cols)
}

/// `Σ c_k · basis_k`.
pub fn combine(basis: &[ComplexMatrix], coeffs: &[f64]) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(basis[0].nrows(), basis[0].ncols());
    for (b, &c) in basis.iter().zip(coeffs) {
        acc = acc + b.scale_real(c);
    }
    acc
}

// ── rank and nullspace ──────────────────────────────────────────────

#[derive(Debug, Clone)]
pub struct RankNullspace {
    pub rank: usize,
    /// Orthonormal real vectors spanning the numerical nullspace.
    pub nullspace: Vec<DVector<f64>>,
    /// Descending singular values.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

/// Rank and orthonormal nullspace basis of a real `r×c` matrix, using the
/// cutoff `rank_tol_factor · σ_max · ε`.
pub fn rank_and_nullspace(l: &DMatrix<f64>, tol: &ToleranceConfig) -> RankNullspace {
    nullspace_with(l, |sigma_max| tol.rank_threshold(sigma_max))
}

/// Like [`rank_and_nullspace`] with a caller-chosen cutoff rule.
pub fn nullspace_with(l: &DMatrix<f64>, threshold: impl Fn(f64) -> f64) -> RankNullspace {
    let (r, c) = l.shape();
    if c == 0 {
        return RankNullspace {
            rank: 0,
            nullspace: Vec::new(),
            singular_values: Vec::new(),
            threshold: 0.0,
        };
    }
    // Pad to at least c rows so that V is c×c.
    let padded = if r < c {
        let mut p = DMatrix::zeros(c, c);
        if r > 0 {
            p.view_mut((0, 0), (r, c)).copy_from(l);
        }
        p
    } else {
        l.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sv = svd.singular_values;
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    let cut = threshold(sigma_max);
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let rank = sv.iter().filter(|&&s| s > cut).count().min(r);
    let nullspace = order
        .iter()
        .filter(|&&k| sv[k] <= cut)
        .map(|&k| v_t.row(k).transpose())
        .collect();
    RankNullspace {
        rank,
        nullspace,
        singular_values: order.iter().map(|&k| sv[k]).collect(),
        threshold: cut,
    }
}

pub fn numerical_rank(l: &DMatrix<f64>, tol: &ToleranceConfig) -> usize {
    rank_and_nullspace(l, tol).rank
}

/// Rank of a complex matrix under an absolute singular-value cutoff.
pub fn complex_rank(m: &ComplexMatrix, cutoff: f64) -> usize {
    m.singular_values().iter().filter(|&&s| s > cutoff).count()
}

// ── eigen decomposition ─────────────────────────────────────────────

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Sorted by real part, then imaginary part.
    pub values: Vec<Complex64>,
    /// Unit-norm right eigenvectors, column `k` paired with `values[k]`.
    pub vectors: ComplexMatrix,
}

/// Lexicographic `(Re, Im)` order, treating real parts within `gap` of each
/// other as equal so that rounding noise cannot reorder conjugate pairs.
pub fn eigen_order(values: &[Complex64], gap: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re));
    let mut out = Vec::with_capacity(idx.len());
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]].re - values[idx[end - 1]].re <= gap {
            end += 1;
        }
        let mut group = idx[start..end].to_vec();
        group.sort_by(|&a, &b| values[a].im.total_cmp(&values[b].im));
        out.extend(group);
        start = end;
    }
    out
}

/// Eigenvalues and unit right eigenvectors through a complex Schur form.
pub fn eigen_decompose(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<EigenDecomposition> {
    let n = m.require_square("eigen_decompose input")?;
    let schur = Schur::try_new(m.0.clone(), f64::EPSILON, SCHUR_MAX_ITER).ok_or_else(|| {
        PtError::Numerical(format!(
            "complex Schur iteration did not converge within {SCHUR_MAX_ITER} iterations for a {n}x{n} matrix"
        ))
    })?;
    let (q, t) = schur.unpack();
    let t_norm = t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let small = (f64::EPSILON * t_norm).max(f64::MIN_POSITIVE);

    let raw: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();
    let mut vecs = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = raw[k];
        let mut y = DVector::<Complex64>::zeros(n);
        y[k] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in (i + 1)..=k {
                s += t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            y[i] = -s / d;
        }
        let v = &q * y;
        let norm = v.norm();
        vecs.push(v / Complex64::new(norm, 0.0));
    }
    let order = eigen_order(&raw, tol.rel_tol * t_norm.max(1.0));
    let values = order.iter().map(|&k| raw[k]).collect();
    let cols: Vec<CVector> = order.iter().map(|&k| vecs[k].clone()).collect();
    Ok(EigenDecomposition {
        values,
        vectors: ComplexMatrix::wrap(DMatrix::from_columns(&cols)),
    })
}

/// Eigenvalues only, in the same order as [`eigen_decompose`].
pub fn eigenvalues(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Vec<Complex64>> {
    Ok(eigen_decompose(m, tol)?.values)
}

/// Ascending real eigenvalues and orthonormal eigenvectors of the Hermitian
/// part of `m`.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let h = m.hermitian_part();
    let eig = SymmetricEigen::new(h.0);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let cols: Vec<CVector> = order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
    (values, ComplexMatrix::wrap(DMatrix::from_columns(&cols)))
}

/// Minimum-norm least-squares solution of `A x = b`, discarding the
/// `drop` smallest singular directions of `A` along with anything below the
/// rank cutoff.
pub fn min_norm_solve(a: &ComplexMatrix, b: &CVector, drop: usize, tol: &ToleranceConfig) -> CVector {
    let svd = SVD::new(a.0.clone(), true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&x, &y| sv[y].total_cmp(&sv[x]));
    let sigma_max = order.first().map(|&k| sv[k]).unwrap_or(0.0);
    let cut = tol.rank_threshold(sigma_max);
    let keep = order.len().saturating_sub(drop);
    let mut x = DVector::<Complex64>::zeros(a.ncols());
    for &k in order.iter().take(keep) {
        if sv[k] <= cut {
            continue;
        }
        let uk = u.column(k);
        let coeff = uk.dotc(b) / Complex64::new(sv[k], 0.0);
        x += v_t.row(k).adjoint() * coeff;
    }
    x
}

/// Fixes the overall sign of an operator defined up to `±`: the first entry
/// (row-major) of modulus above `1e-12·max|m|` gets a nonnegative real part,
/// or a nonnegative imaginary part when its real part vanishes.
pub fn canonical_sign(m: &ComplexMatrix) -> ComplexMatrix {
    let cut = 1e-12 * m.max_abs();
    let lead = m.row_major().into_iter().find(|z| z.norm() > cut);
    let flip = match lead {
        Some(z) if z.re.abs() > cut => z.re < 0.0,
        Some(z) => z.im < 0.0,
        None => false,
    };
    if flip {
        -m
    } else {
        m.clone()
    }
}


// ── matrix exponential ──────────────────────────────────────────────

/// `exp(A)` by Padé scaling and squaring. `exp(0) = I` exactly.
pub fn matrix_exponential(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square("matrix_exponential input")?;
    if a.0.iter().all(|z| *z == ZERO) {
        return Ok(ComplexMatrix::identity(n));
    }
    ComplexMatrix::from_dmatrix(a.0.clone().exp())
}
