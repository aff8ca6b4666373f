//! Hermitian solutions of `W·H = H†·W`, positivity certification and the
//! weighted (Krein) inner products they define.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PtError, Result};
use crate::numerics::{
    combine, eigen_decompose, hermitian_basis, hermitian_eigen, nullspace_with, real_matrix_of_map, CVector,
    ComplexMatrix, ToleranceConfig,
};
use crate::sampling::{normal_vec, rng_from_seed};

/// Seed for the random positivity scan when the caller supplies none.
pub const DEFAULT_SCAN_SEED: u64 = 0x5EED_0001;
const SCAN_BUDGET: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Positivity {
    Positive,
    NotFound,
    /// The best candidate's smallest eigenvalue sits within the rank cutoff.
    Indeterminate,
}

#[derive(Debug, Clone)]
pub struct MetricSolution {
    /// Unit-norm Hermitian matrices spanning every Hermitian solution.
    pub hermitian_basis: Vec<ComplexMatrix>,
    pub dimension: usize,
    pub positive_representative: Option<ComplexMatrix>,
    pub positivity: Positivity,
    /// Smallest eigenvalue of the best candidate, relative to its largest.
    pub min_eigenvalue_ratio: Option<f64>,
}

/// `ψ†·W·φ`.
pub fn weighted_inner_product(w: &ComplexMatrix, psi: &CVector, phi: &CVector) -> Result<Complex64> {
    let n = w.require_square("metric")?;
    if psi.len() != n || phi.len() != n {
        return Err(PtError::Dimension(format!(
            "vectors of length {} and {} do not fit a {n}x{n} metric",
            psi.len(),
            phi.len()
        )));
    }
    Ok(psi.dotc(&w.mul_vec(phi)))
}

/// `(T⁻¹)†·W0·T⁻¹`, the metric of `T·H·T⁻¹` when `W0` is a metric of `H`.
pub fn transform_metric(w0: &ComplexMatrix, t: &ComplexMatrix) -> Result<ComplexMatrix> {
    w0.require_same_shape(t, "transform_metric")?;
    let t_inv = t.inverse()?;
    Ok(&(&t_inv.adjoint() * w0) * &t_inv)
}

/// `‖W·H − H†·W‖_F / max(1, ‖W‖_F·‖H‖_F)`.
pub fn self_adjointness_residual(w: &ComplexMatrix, h: &ComplexMatrix) -> Result<f64> {
    w.require_same_shape(h, "self_adjointness_residual")?;
    h.require_square("H")?;
    let r = (w * h).distance(&(&h.adjoint() * w));
    Ok(r / (w.frobenius_norm() * h.frobenius_norm()).max(1.0))
}

/// Classifies the Hermitian part of `w` as positive definite or not, with
/// the cutoff `rank_tol_factor·ε·λ_max`.
pub fn positivity_of(w: &ComplexMatrix, tol: &ToleranceConfig) -> (Positivity, f64) {
    let (vals, _) = hermitian_eigen(w);
    let lo = vals.first().copied().unwrap_or(0.0);
    let hi = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if hi == 0.0 {
        return (Positivity::NotFound, 0.0);
    }
    let cut = tol.rank_threshold(hi);
    let ratio = lo / hi;
    let verdict = if lo > cut {
        Positivity::Positive
    } else if lo >= -cut {
        Positivity::Indeterminate
    } else {
        Positivity::NotFound
    };
    (verdict, ratio)
}

/// Biorthogonal metric `Σ φ_k·φ_k†` over unit eigenvectors `φ_k` of `H†`,
/// taken as the rows of `V⁻¹`. `None` unless `H` has an all-real spectrum
/// and a well-conditioned eigenbasis.
pub fn biorthogonal_metric(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Option<ComplexMatrix>> {
    let n = h.require_square("H")?;
    let eig = eigen_decompose(h, tol)?;
    let tau = tol.abs_tol.max(tol.rel_tol * h.frobenius_norm());
    if eig.values.iter().any(|z| z.im.abs() > tau) {
        return Ok(None);
    }
    if eig.vectors.inverse_condition() <= f64::EPSILON.sqrt() {
        return Ok(None);
    }
    let v_inv = eig.vectors.inverse()?;
    let mut w = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let phi: CVector = v_inv.as_dmatrix().row(k).adjoint();
        let phi = &phi / Complex64::new(phi.norm(), 0.0);
        w = w + ComplexMatrix::wrap(&phi * phi.adjoint());
    }
    Ok(Some(w.hermitian_part()))
}

pub fn solve_metric_space(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<MetricSolution> {
    solve_metric_space_seeded(h, tol, DEFAULT_SCAN_SEED)
}

/// Solves `W·H = H†·W` over Hermitian `W`.
///
/// The basis is the real nullspace of `W ↦ W·H − H†·W` on the `n²`
/// Hermitian coordinates. A positive representative comes from
/// [`biorthogonal_metric`] when available, otherwise from a seeded scan of
/// random combinations of the basis.
pub fn solve_metric_space_seeded(h: &ComplexMatrix, tol: &ToleranceConfig, seed: u64) -> Result<MetricSolution> {
    let n = h.require_square("H")?;
    let domain = hermitian_basis(n);
    let ha = h.adjoint();
    let l = real_matrix_of_map(&domain, |b| &(b * h) - &(&ha * b));
    let ns = nullspace_with(&l, |smax| tol.rank_threshold(smax).max(tol.abs_tol * smax));
    let basis: Vec<ComplexMatrix> = ns
        .nullspace
        .iter()
        .map(|v| {
            let m = combine(&domain, v.as_slice()).hermitian_part();
            let norm = m.frobenius_norm();
            m.scale_real(1.0 / norm)
        })
        .collect();
    let dimension = basis.len();

    let mut best: Option<(ComplexMatrix, Positivity, f64)> = None;
    if let Some(w) = biorthogonal_metric(h, tol)? {
        let (p, ratio) = positivity_of(&w, tol);
        let r = self_adjointness_residual(&w, h)?;
        if tol.accepts(r, 1.0) {
            best = Some((w, p, ratio));
        }
    }
    if !matches!(best, Some((_, Positivity::Positive, _))) && dimension > 0 {
        let mut rng = rng_from_seed(seed);
        for _ in 0..SCAN_BUDGET {
            let coeffs = normal_vec(&mut rng, dimension);
            let w = combine(&basis, &coeffs);
            let (p, ratio) = positivity_of(&w, tol);
            // a negative definite draw flips to a positive one
            let (w, p, ratio) = if p == Positivity::NotFound && positivity_of(&(-&w), tol).0 == Positivity::Positive {
                let neg = -&w;
                let (p2, r2) = positivity_of(&neg, tol);
                (neg, p2, r2)
            } else {
                (w, p, ratio)
            };
            let better = best.as_ref().map_or(true, |(_, _, r)| ratio > *r);
            if better {
                best = Some((w, p, ratio));
            }
            if p == Positivity::Positive {
                break;
            }
        }
    }

    let (positive_representative, positivity, min_eigenvalue_ratio) = match best {
        Some((w, Positivity::Positive, r)) => (Some(w), Positivity::Positive, Some(r)),
        Some((_, p, r)) => (None, p, Some(r)),
        None => (None, Positivity::NotFound, None),
    };
    Ok(MetricSolution {
        hermitian_basis: basis,
        dimension,
        positive_representative,
        positivity,
        min_eigenvalue_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ZERO;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermitian_h_admits_identity() {
        let h = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let sol = solve_metric_space(&h, &tol()).unwrap();
        assert_eq!(sol.dimension, 2);
        assert_eq!(sol.positivity, Positivity::Positive);
        let w = sol.positive_representative.unwrap();
        assert!(self_adjointness_residual(&w, &h).unwrap() < 1e-14);
        assert!(self_adjointness_residual(&ComplexMatrix::identity(2), &h).unwrap() < 1e-15);
    }

    #[test]
    fn jordan_block_has_no_positive_metric() {
        let h = ComplexMatrix::jordan_block(2, ZERO);
        let sol = solve_metric_space(&h, &tol()).unwrap();
        assert!(sol.positive_representative.is_none());
        assert!(sol.dimension >= 1);
        let s3 = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!(self_adjointness_residual(&s3, &h).unwrap() > 0.1);
    }

    #[test]
    fn inner_product_examples() {
        let e1 = CVector::from_vec(vec![c(1.0, 0.0), ZERO]);
        let e2 = CVector::from_vec(vec![ZERO, c(1.0, 0.0)]);
        let id = ComplexMatrix::identity(2);
        assert_eq!(weighted_inner_product(&id, &e1, &e1).unwrap(), c(1.0, 0.0));
        let s3 = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert_eq!(weighted_inner_product(&s3, &e2, &e2).unwrap(), c(-1.0, 0.0));
        let short = CVector::from_vec(vec![ZERO]);
        assert!(weighted_inner_product(&s3, &short, &e1).is_err());
    }

    #[test]
    fn transform_identity_and_singular() {
        let w = ComplexMatrix::from_real_rows(2, 2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
        assert_eq!(transform_metric(&w, &ComplexMatrix::identity(2)).unwrap(), w);
        let sing = ComplexMatrix::from_real_rows(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(transform_metric(&w, &sing), Err(PtError::Numerical(_))));
    }

    #[test]
    fn complex_pair_has_no_positive_metric() {
        let h = ComplexMatrix::from_rows(2, 2, &[c(1.0, 0.0), c(0.0, 2.0), c(0.0, 2.0), c(-1.0, 0.0)]).unwrap();
        let sol = solve_metric_space(&h, &tol()).unwrap();
        assert_eq!(sol.positivity, Positivity::NotFound);
        assert!(sol.dimension > 0);
        for b in &sol.hermitian_basis {
            assert!(self_adjointness_residual(b, &h).unwrap() < 1e-12);
        }
    }
}
