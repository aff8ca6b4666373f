#![allow(dead_code)]

use num_complex::Complex64;
use ptlab::numerics::CVector;
use ptlab::{ComplexMatrix, ToleranceConfig};

pub fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// exp(A) by scaling and squaring of a plain Taylor series, kept separate
/// from the library routine.
pub fn taylor_exp(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let norm = a.frobenius_norm();
    let mut s = 0;
    while norm / f64::powi(2.0, s) > 0.5 {
        s += 1;
    }
    let scaled = a.scale_real(1.0 / f64::powi(2.0, s));
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..30 {
        term = (&term * &scaled).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Eigenvalues of a 2×2 matrix from the quadratic formula.
pub fn eig2(m: &ComplexMatrix) -> [Complex64; 2] {
    let tr = m.get(0, 0) + m.get(1, 1);
    let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
    let disc = (tr * tr / 4.0 - det).sqrt();
    [tr / 2.0 - disc, tr / 2.0 + disc]
}

/// Distance between two multisets of complex numbers under the best
/// greedy matching.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// `x` and `y` are parallel: |x†y| = ‖x‖‖y‖.
pub fn parallel(x: &CVector, y: &CVector, eps: f64) -> bool {
    (x.dotc(y).norm() - x.norm() * y.norm()).abs() <= eps * x.norm() * y.norm()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
