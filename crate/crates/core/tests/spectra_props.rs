mod common;

use common::{c, multiset_distance, parallel, tol};
use num_complex::Complex64;
use proptest::prelude::*;
use ptlab::catalog::{pt2_h0, pt2_jordan_chain, pseudo2_h0, pseudo2_jordan_chain, Pt2Params};
use ptlab::involutions::make_diagonal_parity;
use ptlab::numerics::eigenvalues;
use ptlab::sampling::{item_rng, real_normal, well_conditioned_complex};
use ptlab::spectra::{build_pt_jordan, classify_spectrum, jordan_chain};
use ptlab::symmetry::{construct_pt_block, PtBlockParams};
use ptlab::ComplexMatrix;

fn jordan_sample(k: usize) -> ComplexMatrix {
    let cases = [
        ComplexMatrix::direct_sum(&[ComplexMatrix::jordan_block(3, c(5.0, 0.0)), ComplexMatrix::jordan_block(1, c(2.0, 0.0))]),
        ComplexMatrix::direct_sum(&[ComplexMatrix::jordan_block(2, c(1.0, 0.0)), ComplexMatrix::jordan_block(2, c(-1.0, 0.0))]),
        ComplexMatrix::direct_sum(&[ComplexMatrix::jordan_block(2, c(0.5, 1.0)), ComplexMatrix::jordan_block(2, c(0.5, -1.0))]),
        build_pt_jordan(2, 1, 3.0).unwrap().0,
        ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]),
        ComplexMatrix::direct_sum(&[ComplexMatrix::jordan_block(2, c(1.0, 0.0)), ComplexMatrix::jordan_block(1, c(1.0, 0.0))]),
    ];
    cases[k % cases.len()].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn segre_is_similarity_invariant(seed in any::<u64>(), k in 0usize..6) {
        let h = jordan_sample(k);
        let t = well_conditioned_complex(&mut item_rng(seed, 0), h.dim(), 0.5);
        let a = classify_spectrum(&h, &tol(), None).unwrap();
        let b = classify_spectrum(&h.similarity(&t).unwrap(), &tol(), None).unwrap();
        let blocks = |r: &ptlab::spectra::SpectrumReport| r.segre.iter().map(|s| s.blocks.clone()).collect::<Vec<_>>();
        prop_assert_eq!(blocks(&a), blocks(&b));
        prop_assert_eq!(a.reality_class, b.reality_class);
        prop_assert_eq!(b.dimension(), h.dim());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pt_spectrum_is_conjugation_closed(seed in any::<u64>(), m in 1usize..4, n in 1usize..4) {
        let mut rng = item_rng(seed, 1);
        let h = construct_pt_block(&PtBlockParams {
            a: real_normal(&mut rng, m, m),
            b: real_normal(&mut rng, m, n),
            c: real_normal(&mut rng, n, m),
            d: real_normal(&mut rng, n, n),
        }).unwrap();
        let ev = eigenvalues(&h, &tol()).unwrap();
        let conj: Vec<Complex64> = ev.iter().map(|z| z.conj()).collect();
        prop_assert!(multiset_distance(&ev, &conj) <= 1e-7 * h.frobenius_norm());
        let p0 = make_diagonal_parity(m, n).unwrap();
        let r = classify_spectrum(&h, &tol(), Some((ptlab::symmetry::SymmetryKind::Pt, &p0))).unwrap();
        prop_assert_ne!(r.reality_class, ptlab::spectra::RealityClass::Mixed);
    }

    #[test]
    fn generic_chain_relations(e in -2.0f64..2.0, gamma in 0.3f64..2.5, delta in -1.4f64..1.4, which in 0usize..2) {
        let p = Pt2Params::new(e, gamma, gamma, delta);
        let h = if which == 0 { pt2_h0(&p) } else { pseudo2_h0(&p) };
        let ch = jordan_chain(&h, c(e, 0.0), &tol()).unwrap();
        for alpha in [0.0, 1.0, -2.5] {
            let ch = ch.with_alpha(c(alpha, 0.0));
            for r in ch.residuals(&h) {
                prop_assert!(r < tol().abs_tol * h.frobenius_norm().max(1.0));
            }
        }
        let cat = if which == 0 {
            pt2_jordan_chain(e, gamma, delta, c(1.0, 0.0), c(0.0, 0.0)).unwrap()
        } else {
            pseudo2_jordan_chain(e, gamma, delta, c(1.0, 0.0), c(0.0, 0.0)).unwrap()
        };
        prop_assert!(parallel(&cat.phi0, &ch.vectors[0], 1e-10));
        // Φ1 agrees up to the scale of Φ0 and a multiple of Φ0
        let scale = ch.vectors[0].dotc(&cat.phi0) / ch.vectors[0].norm_squared();
        let diff = &cat.phi1 - &ch.vectors[1] * scale;
        prop_assert!(parallel(&diff, &ch.vectors[0], 1e-8) || diff.norm() < 1e-10);
    }

    #[test]
    fn pt_chain_vectors_share_pt_eigenvalue(
        e in -2.0f64..2.0, gamma in 0.3f64..2.5, delta in -1.4f64..1.4, alpha in -3.0f64..3.0, arg in -3.0f64..3.0,
    ) {
        let n0 = Complex64::from_polar(1.3, arg);
        let ch = pt2_jordan_chain(e, gamma, delta, n0, c(alpha, 0.0)).unwrap();
        let lam = ch.pt_eigenvalue.unwrap();
        let p = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        for v in [&ch.phi0, &ch.phi1] {
            prop_assert!((p.mul_vec(&v.conjugate()) - v * lam).norm() < 1e-10 * v.norm().max(1.0));
        }
    }
}
