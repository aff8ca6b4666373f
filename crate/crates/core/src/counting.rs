//! Real parameter counts of the matrix classes: nullspace dimensions of the
//! defining linear conditions, orbit dimensions of the symmetry operators
//! and the local dimension of the real-characteristic-polynomial variety.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PtError, Result};
use crate::exec::{map_indexed, Execution};
use crate::involutions::make_diagonal_parity;
use crate::numerics::{nullspace_with, real_basis, real_matrix_of_map, ComplexMatrix, ToleranceConfig};
use crate::sampling::{item_rng, normal_vec, well_conditioned_complex};

pub const DEFAULT_COUNT_SEED: u64 = 0xC0DE_0003;
const BASE_POINT_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CountKind {
    RealSymmetric,
    Hermitian,
    Pt,
    Pseudo,
    SelfAdjointOrGenPt,
}

impl CountKind {
    pub const ALL: [CountKind; 5] = [
        CountKind::RealSymmetric,
        CountKind::Hermitian,
        CountKind::Pt,
        CountKind::Pseudo,
        CountKind::SelfAdjointOrGenPt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CountKind::RealSymmetric => "real_symmetric",
            CountKind::Hermitian => "hermitian",
            CountKind::Pt => "pt",
            CountKind::Pseudo => "pseudo",
            CountKind::SelfAdjointOrGenPt => "self_adjoint_or_gen_pt",
        }
    }

    /// Closed-form total for dimension `m + n`.
    pub fn expected(self, m: usize, n: usize) -> usize {
        let d = m + n;
        match self {
            CountKind::RealSymmetric => d * (d + 1) / 2,
            CountKind::Hermitian => d * d,
            CountKind::Pt | CountKind::Pseudo => d * d + 2 * m * n,
            CountKind::SelfAdjointOrGenPt => 2 * d * d - d,
        }
    }
}

fn nullity(n: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix, tol: &ToleranceConfig) -> usize {
    let domain = real_basis(n, n);
    let l = real_matrix_of_map(&domain, f);
    nullspace_with(&l, |s| tol.rank_threshold(s)).nullspace.len()
}

/// Stacks two maps into one, so their common kernel is measured.
fn stacked(
    f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    g: impl Fn(&ComplexMatrix) -> ComplexMatrix,
) -> impl Fn(&ComplexMatrix) -> ComplexMatrix {
    move |x| {
        let (a, b) = (f(x), g(x));
        let n = a.nrows();
        ComplexMatrix::from_fn(2 * n, a.ncols(), |i, j| if i < n { a.get(i, j) } else { b.get(i - n, j) })
    }
}

fn require_dims(m: usize, n: usize) -> Result<usize> {
    if m + n == 0 {
        return Err(PtError::Dimension("counting needs m + n ≥ 1".into()));
    }
    Ok(m + n)
}

/// Dimension of the real-linear matrix family at a fixed operator. For
/// [`CountKind::SelfAdjointOrGenPt`] this is the variety dimension at a
/// seeded random base point.
pub fn count_matrix_family(kind: CountKind, m: usize, n: usize, tol: &ToleranceConfig) -> Result<usize> {
    let d = require_dims(m, n)?;
    let p0 = make_diagonal_parity(m, n)?.into_matrix();
    Ok(match kind {
        CountKind::RealSymmetric => nullity(d, stacked(|h| h - &h.transpose(), |h| h - &h.conj()), tol),
        CountKind::Hermitian => nullity(d, |h| h - &h.adjoint(), tol),
        CountKind::Pt => nullity(d, |h| &(&p0 * h) - &(&h.conj() * &p0), tol),
        CountKind::Pseudo => nullity(d, |h| &(&p0 * h) - &(&h.adjoint() * &p0), tol),
        CountKind::SelfAdjointOrGenPt => {
            count_real_charpoly_variety_sampled(d, DEFAULT_COUNT_SEED, tol)?.dimension
        }
    })
}

/// Dimension of the orbit of `P0(m, n)`: real similarities for PT,
/// unitary similarities for pseudo-Hermiticity, zero otherwise.
pub fn count_operator_orbit(kind: CountKind, m: usize, n: usize, tol: &ToleranceConfig) -> Result<usize> {
    let d = require_dims(m, n)?;
    let p0 = make_diagonal_parity(m, n)?.into_matrix();
    let comm = |x: &ComplexMatrix| &(x * &p0) - &(&p0 * x);
    Ok(match kind {
        CountKind::Pt => d * d - nullity(d, stacked(comm, |x| x - &x.conj()), tol),
        CountKind::Pseudo => d * d - nullity(d, stacked(comm, |x| x + &x.adjoint()), tol),
        _ => 0,
    })
}

/// Coefficients `c_0, …, c_{N−1}` of `det(z − H) = z^N + Σ c_k z^k`
/// (Faddeev–LeVerrier).
pub fn characteristic_coefficients(h: &ComplexMatrix) -> Vec<Complex64> {
    let n = h.dim();
    let id = ComplexMatrix::identity(n);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut mk = ComplexMatrix::zeros(n, n);
    for k in 1..=n {
        mk = &(h * &mk) + &id.scale(coeffs[n - k + 1]);
        coeffs[n - k] = -(h * &mk).trace() / k as f64;
    }
    coeffs.truncate(n);
    coeffs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarietyCount {
    pub dimension: usize,
    pub jacobian_rank: usize,
    pub attempts: usize,
}

/// `2N²` minus the rank of the derivative of `H ↦ Im(charpoly coefficients)`
/// at `base`, by central differences with step `1e-6·‖base‖`.
pub fn count_real_charpoly_variety(base: &ComplexMatrix, tol: &ToleranceConfig) -> Result<usize> {
    let n = base.require_square("base point")?;
    let rank = charpoly_jacobian_rank(base, tol)?;
    Ok(2 * n * n - rank)
}

fn charpoly_jacobian_rank(base: &ComplexMatrix, tol: &ToleranceConfig) -> Result<usize> {
    let n = base.require_square("base point")?;
    let imag = charpoly_imag_norm(base);
    let scale = base.frobenius_norm().max(1.0);
    if imag > tol.abs_tol.max(1e-8 * scale.powi(n as i32)) {
        return Err(PtError::Contract(format!(
            "base point characteristic polynomial is not real (imaginary part {imag:.3e})"
        )));
    }
    let h = 1e-6 * scale;
    let domain = real_basis(n, n);
    let im = |m: &ComplexMatrix| -> Vec<f64> { characteristic_coefficients(m).iter().map(|z| z.im).collect() };
    let mut jac = DMatrix::zeros(n, domain.len());
    for (k, e) in domain.iter().enumerate() {
        let plus = im(&(base + &e.scale_real(h)));
        let minus = im(&(base - &e.scale_real(h)));
        for r in 0..n {
            jac[(r, k)] = (plus[r] - minus[r]) / (2.0 * h);
        }
    }
    for r in 0..n {
        let norm = jac.row(r).norm();
        if norm > 0.0 {
            jac.row_mut(r).scale_mut(1.0 / norm);
        }
    }
    let sv = jac.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s > 1e-6 * smax).count())
}

/// `‖Im c‖` over the characteristic coefficients.
pub fn charpoly_imag_norm(h: &ComplexMatrix) -> f64 {
    characteristic_coefficients(h).iter().map(|z| z.im * z.im).sum::<f64>().sqrt()
}

/// `S·D·S⁻¹` with real simple `D` and a well-conditioned complex `S`.
pub fn random_real_spectrum_matrix(n: usize, seed: u64, index: u64) -> Result<ComplexMatrix> {
    let mut rng = item_rng(seed, index);
    let mut d = normal_vec(&mut rng, n);
    d.sort_by(f64::total_cmp);
    for k in 1..n {
        if d[k] - d[k - 1] < 0.1 {
            d[k] = d[k - 1] + 0.1;
        }
    }
    let s = well_conditioned_complex(&mut rng, n, 0.5);
    ComplexMatrix::from_real_diagonal(&d).similarity(&s.inverse()?)
}

/// [`count_real_charpoly_variety`] at seeded base points, retrying while
/// the derivative is rank deficient.
pub fn count_real_charpoly_variety_sampled(n: usize, seed: u64, tol: &ToleranceConfig) -> Result<VarietyCount> {
    if n == 0 {
        return Err(PtError::Dimension("variety count needs N ≥ 1".into()));
    }
    for attempt in 0..BASE_POINT_ATTEMPTS {
        let base = random_real_spectrum_matrix(n, seed, attempt as u64)?;
        let rank = charpoly_jacobian_rank(&base, tol)?;
        if rank == n {
            return Ok(VarietyCount {
                dimension: 2 * n * n - rank,
                jacobian_rank: rank,
                attempts: attempt + 1,
            });
        }
    }
    Err(PtError::Numerical(format!(
        "derivative rank deficient at {BASE_POINT_ATTEMPTS} base points; count indeterminate"
    )))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub kind: CountKind,
    pub m: usize,
    pub n: usize,
    pub matrix_dim: usize,
    pub orbit_dim: usize,
    pub total: usize,
    pub expected: usize,
    #[serde(rename = "match")]
    pub matches: bool,
}

impl CountReport {
    pub const CSV_HEADER: [&'static str; 8] =
        ["kind", "m", "n", "matrix_dim", "orbit_dim", "total", "expected", "match"];

    pub fn csv_record(&self) -> [String; 8] {
        [
            self.kind.name().to_string(),
            self.m.to_string(),
            self.n.to_string(),
            self.matrix_dim.to_string(),
            self.orbit_dim.to_string(),
            self.total.to_string(),
            self.expected.to_string(),
            self.matches.to_string(),
        ]
    }
}

fn count_one(kind: CountKind, m: usize, n: usize, seed: u64, tol: &ToleranceConfig) -> Result<CountReport> {
    let matrix_dim = match kind {
        CountKind::SelfAdjointOrGenPt => count_real_charpoly_variety_sampled(m + n, seed, tol)?.dimension,
        _ => count_matrix_family(kind, m, n, tol)?,
    };
    let orbit_dim = count_operator_orbit(kind, m, n, tol)?;
    let total = matrix_dim + orbit_dim;
    let expected = kind.expected(m, n);
    Ok(CountReport {
        kind,
        m,
        n,
        matrix_dim,
        orbit_dim,
        total,
        expected,
        matches: total == expected,
    })
}

/// Every row of the parameter-count table for dimensions `1..=max_dim`,
/// with PT and pseudo-Hermitian rows for every signature `(m, n)`.
pub fn table1_report(max_dim: usize, exec: Execution, tol: &ToleranceConfig) -> Result<Vec<CountReport>> {
    table1_report_seeded(max_dim, exec, tol, DEFAULT_COUNT_SEED)
}

pub fn table1_report_seeded(max_dim: usize, exec: Execution, tol: &ToleranceConfig, seed: u64) -> Result<Vec<CountReport>> {
    if max_dim < 2 {
        return Err(PtError::Constraint("max_dim ≥ 2 violated".into()));
    }
    let mut jobs = Vec::new();
    for d in 1..=max_dim {
        jobs.push((CountKind::RealSymmetric, d, 0));
        jobs.push((CountKind::Hermitian, d, 0));
        for kind in [CountKind::Pt, CountKind::Pseudo] {
            for m in (0..=d).rev() {
                jobs.push((kind, m, d - m));
            }
        }
        jobs.push((CountKind::SelfAdjointOrGenPt, d, 0));
    }
    let rows = map_indexed(exec, jobs.len(), |k| {
        let (kind, m, n) = jobs[k];
        count_one(kind, m, n, seed ^ ((m + n) as u64), tol)
    });
    rows.into_iter().collect()
}

/// Column values of the table: per dimension, the largest total over
/// signatures for each of the four rows (PT and pseudo-Hermitian merged).
pub fn table1_columns(reports: &[CountReport]) -> Vec<(usize, [usize; 4])> {
    let max_dim = reports.iter().map(|r| r.m + r.n).max().unwrap_or(0);
    (1..=max_dim)
        .map(|d| {
            let best = |f: &dyn Fn(CountKind) -> bool| {
                reports
                    .iter()
                    .filter(|r| r.m + r.n == d && f(r.kind))
                    .map(|r| r.total)
                    .max()
                    .unwrap_or(0)
            };
            (
                d,
                [
                    best(&|k| k == CountKind::RealSymmetric),
                    best(&|k| k == CountKind::Hermitian),
                    best(&|k| matches!(k, CountKind::Pt | CountKind::Pseudo)),
                    best(&|k| k == CountKind::SelfAdjointOrGenPt),
                ],
            )
        })
        .collect()
}
