mod common;

use common::{c, tol};
use nalgebra::DMatrix;
use ptlab::counting::*;
use ptlab::exec::Execution;
use ptlab::involutions::make_diagonal_parity;
use ptlab::numerics::vectorize;
use ptlab::sampling::{hermitian_matrix, item_rng, real_matrix, real_normal};
use ptlab::symmetry::{construct_pt_block, PtBlockParams};
use ptlab::{ComplexMatrix, PtError};

/// Rank of the real span of sampled matrices, from an SVD of their stacked
/// real coordinates.
fn span_rank(samples: &[ComplexMatrix]) -> usize {
    let cols: Vec<_> = samples.iter().map(vectorize).collect();
    let m = DMatrix::from_columns(&cols);
    let sv = m.singular_values();
    let smax = sv.max();
    sv.iter().filter(|&&s| s > 1e-9 * smax).count()
}

fn signatures(max: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=max).flat_map(|d| (0..=d).map(move |m| (m, d - m)))
}

#[test]
fn family_counts_agree_with_sampled_spans() {
    for (m, n) in signatures(6) {
        let d = m + n;
        let samples: Vec<_> = (0..2 * d * d + 4)
            .map(|k| {
                let mut rng = item_rng(31, (d * 100 + m * 10 + k) as u64);
                if m == 0 || n == 0 {
                    // P0 = ±1 leaves the real matrices
                    return real_matrix(&mut rng, d, d);
                }
                construct_pt_block(&PtBlockParams {
                    a: real_normal(&mut rng, m, m),
                    b: real_normal(&mut rng, m, n),
                    c: real_normal(&mut rng, n, m),
                    d: real_normal(&mut rng, n, n),
                })
                .unwrap()
            })
            .collect();
        let fam = count_matrix_family(CountKind::Pt, m, n, &tol()).unwrap();
        assert_eq!(fam, span_rank(&samples), "pt ({m}, {n})");
        assert_eq!(fam, count_matrix_family(CountKind::Pseudo, m, n, &tol()).unwrap());
        if n == 0 {
            let herm: Vec<_> = (0..2 * d * d + 4).map(|k| hermitian_matrix(&mut item_rng(32, k as u64), d)).collect();
            assert_eq!(count_matrix_family(CountKind::Hermitian, d, 0, &tol()).unwrap(), span_rank(&herm));
            let sym: Vec<_> = (0..2 * d * d + 4)
                .map(|k| {
                    let a = real_matrix(&mut item_rng(33, k as u64), d, d);
                    &a + &a.transpose()
                })
                .collect();
            assert_eq!(count_matrix_family(CountKind::RealSymmetric, d, 0, &tol()).unwrap(), span_rank(&sym));
        }
    }
}

#[test]
fn orbit_counts_agree_with_sampled_tangents() {
    for (m, n) in signatures(6) {
        let d = m + n;
        let p0 = make_diagonal_parity(m, n).unwrap().into_matrix();
        let tangent = |x: &ComplexMatrix| &(x * &p0) - &(&p0 * x);
        let real: Vec<_> = (0..2 * d * d + 4)
            .map(|k| tangent(&real_matrix(&mut item_rng(34, k as u64), d, d)))
            .collect();
        assert_eq!(count_operator_orbit(CountKind::Pt, m, n, &tol()).unwrap(), span_rank(&real), "pt ({m}, {n})");
        let anti: Vec<_> = (0..2 * d * d + 4)
            .map(|k| tangent(&hermitian_matrix(&mut item_rng(35, k as u64), d).scale(c(0.0, 1.0))))
            .collect();
        assert_eq!(count_operator_orbit(CountKind::Pseudo, m, n, &tol()).unwrap(), span_rank(&anti), "pseudo ({m}, {n})");
    }
}

#[test]
fn totals_match_the_closed_forms() {
    for (m, n) in signatures(6) {
        for kind in [CountKind::Pt, CountKind::Pseudo] {
            let total = count_matrix_family(kind, m, n, &tol()).unwrap() + count_operator_orbit(kind, m, n, &tol()).unwrap();
            assert_eq!(total, kind.expected(m, n), "{kind:?} ({m}, {n})");
        }
    }
}

#[test]
fn real_charpoly_variety_has_codimension_n() {
    for n in 1..=6 {
        for k in 0..5 {
            let base = random_real_spectrum_matrix(n, 36, k).unwrap();
            assert_eq!(count_real_charpoly_variety(&base, &tol()).unwrap(), 2 * n * n - n, "n={n} k={k}");
        }
    }
}

#[test]
fn complex_charpoly_base_is_rejected() {
    let base = ComplexMatrix::from_diagonal(&[c(1.0, 1.0), c(2.0, 0.0)]);
    assert!(matches!(count_real_charpoly_variety(&base, &tol()), Err(PtError::Contract(_))));
}

#[test]
fn table_is_execution_independent() {
    let seq = table1_report(5, Execution::Sequential, &tol()).unwrap();
    let par = table1_report(5, Execution::Parallel, &tol()).unwrap();
    assert_eq!(seq, par);
    assert!(seq.iter().all(|r| r.matches));
    assert!(matches!(table1_report(1, Execution::Sequential, &tol()), Err(PtError::Constraint(_))));
}
