//! Seeded random matrices for searches, sweeps and property draws.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::ComplexMatrix;

pub type SeededRng = ChaCha8Rng;

/// Deterministic stream for work item `index` of a batch seeded by `seed`.
pub fn item_rng(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn normal_vec(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| normal(rng)).collect()
}

pub fn real_normal(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| normal(rng))
}

pub fn real_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(normal(rng), 0.0))
}

pub fn complex_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(normal(rng), normal(rng)))
}

pub fn hermitian_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    complex_matrix(rng, n, n).hermitian_part()
}

pub fn real_symmetric_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    real_matrix(rng, n, n).hermitian_part()
}

/// Identity plus a Gaussian perturbation of Frobenius size about `spread`.
/// Conditioning stays modest for `spread` below one.
pub fn well_conditioned_real(rng: &mut impl Rng, n: usize, spread: f64) -> ComplexMatrix {
    let g = real_matrix(rng, n, n);
    let s = spread / (n as f64);
    ComplexMatrix::identity(n) + g.scale_real(s)
}

pub fn well_conditioned_complex(rng: &mut impl Rng, n: usize, spread: f64) -> ComplexMatrix {
    let g = complex_matrix(rng, n, n);
    let s = spread / (n as f64);
    ComplexMatrix::identity(n) + g.scale_real(s)
}

/// Unitary factor of the QR decomposition of a complex Gaussian matrix, with
/// the diagonal phases of R removed.
pub fn unitary_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = complex_matrix(rng, n, n).into_dmatrix();
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let q = DMatrix::from_fn(n, n, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        q[(i, j)] * phase
    });
    ComplexMatrix::wrap(q)
}

pub fn positive_definite(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = complex_matrix(rng, n, n);
    (&g * &g.adjoint()) + ComplexMatrix::identity(n).scale_real(0.5)
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}
