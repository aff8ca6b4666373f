mod common;

use common::{c, taylor_exp, tol};
use proptest::prelude::*;
use ptlab::involutions::{
    grassmann_coset_element, make_diagonal_parity, sip_matrix, sip_similarity, sip_source_parity, transport,
    verify_involution, GrassmannCosetSpec, InvolutionKind,
};
use ptlab::numerics::matrix_exponential;
use ptlab::sampling::{complex_matrix, item_rng, unitary_matrix, well_conditioned_complex, well_conditioned_real};
use ptlab::ComplexMatrix;

fn kinds() -> impl Strategy<Value = InvolutionKind> {
    prop_oneof![
        Just(InvolutionKind::RealInvolution),
        Just(InvolutionKind::HermitianInvolution),
        Just(InvolutionKind::AntilinearCore),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn transport_preserves_kind_trace_and_signature(
        seed in any::<u64>(), m in 0usize..4, n in 0usize..4, kind in kinds()
    ) {
        prop_assume!(m + n >= 1);
        let d = m + n;
        let p0 = make_diagonal_parity(m, n).unwrap().as_kind(kind, &tol()).unwrap();
        let mut rng = item_rng(seed, 0);
        let t = match kind {
            InvolutionKind::RealInvolution => well_conditioned_real(&mut rng, d, 0.6),
            InvolutionKind::HermitianInvolution => unitary_matrix(&mut rng, d),
            InvolutionKind::AntilinearCore => well_conditioned_complex(&mut rng, d, 0.6),
        };
        let moved = transport(&p0, &t, &tol()).unwrap();
        let check = verify_involution(moved.matrix(), kind, &tol()).unwrap();
        prop_assert!(check.holds);
        if kind.is_involutory() {
            let tr = moved.matrix().trace();
            prop_assert!((tr - c(m as f64 - n as f64, 0.0)).norm() < 1e-8);
            prop_assert_eq!(check.signature, Some((m, n)));
        }
    }

    #[test]
    fn coset_element_is_exponential(seed in any::<u64>(), m in 1usize..4, n in 1usize..4, x in -2.0f64..2.0) {
        let b = complex_matrix(&mut item_rng(seed, 1), m, n).scale_real(0.8);
        let spec = GrassmannCosetSpec { m, n, b, x };
        let u = grassmann_coset_element(&spec).unwrap();
        let a = spec.generator().unwrap().scale_real(x);
        let e = matrix_exponential(&a).unwrap();
        prop_assert!(u.distance(&e) <= 1e-9 * e.frobenius_norm());
        prop_assert!(u.distance(&taylor_exp(&a)) <= 1e-9 * e.frobenius_norm());
        prop_assert!((&u * &u.adjoint()).distance(&ComplexMatrix::identity(m + n)) < 1e-10);
    }
}

#[test]
fn sip_intertwines_real_jordan_blocks() {
    for lambda in [-2.0, 0.0, 3.5] {
        for n in 1..=8 {
            let j = ComplexMatrix::jordan_block(n, c(lambda, 0.0));
            let s = sip_matrix(n);
            assert!((&(&s * &j) * &s).distance(&j.adjoint()) < 1e-12);
        }
    }
}

#[test]
fn sip_similarity_maps_parity_to_sip() {
    for n in 1..=9 {
        let (q, q_inv) = sip_similarity(n).unwrap();
        let p = sip_source_parity(n).unwrap();
        assert!((&q * &q_inv).distance(&ComplexMatrix::identity(n)) < 1e-12);
        let image = &(&q * p.matrix()) * &q_inv;
        assert!(image.distance(&sip_matrix(n)) < 1e-12, "n = {n}");
    }
}
