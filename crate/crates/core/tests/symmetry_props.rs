mod common;

use common::{multiset_distance, tol};
use proptest::prelude::*;
use ptlab::involutions::{make_diagonal_parity, make_sip, transport, InvolutionKind, InvolutionOperator};
use ptlab::numerics::eigenvalues;
use ptlab::sampling::{
    complex_matrix, hermitian_matrix, item_rng, real_normal, uniform, unitary_matrix,
    well_conditioned_complex, well_conditioned_real,
};
use ptlab::symmetry::{
    check_symmetry, construct_gen_pt_diag, construct_pseudo_block, construct_pt_block, construct_rotated_hermitian,
    construct_self_adjoint_from_diag_metric, diag_phase_operator, find_gen_pt_operator, DiagMetricSelfAdjointParams,
    DiagPhaseGenPtParams, PseudoBlockParams, PtBlockParams, RotatedHermitianParams, SymmetryKind,
};

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..4, 1usize..3).prop_filter("N ≤ 5", |(m, n)| m + n <= 5)
}

fn pt_block(seed: u64, m: usize, n: usize) -> ptlab::ComplexMatrix {
    let mut rng = item_rng(seed, 0);
    construct_pt_block(&PtBlockParams {
        a: real_normal(&mut rng, m, m),
        b: real_normal(&mut rng, m, n),
        c: real_normal(&mut rng, n, m),
        d: real_normal(&mut rng, n, n),
    })
    .unwrap()
}

fn gen_pt_diag(seed: u64, n: usize) -> (ptlab::ComplexMatrix, Vec<f64>) {
    let mut rng = item_rng(seed, 3);
    let phases: Vec<f64> = (0..n).map(|_| uniform(&mut rng, -3.0, 3.0)).collect();
    let r = real_normal(&mut rng, n, n);
    let h = construct_gen_pt_diag(&DiagPhaseGenPtParams { phases: phases.clone(), r }).unwrap();
    (h, phases)
}

fn self_adjoint(seed: u64, n: usize) -> ptlab::ComplexMatrix {
    let mut rng = item_rng(seed, 4);
    let omegas: Vec<f64> = (0..n).map(|_| uniform(&mut rng, 0.2, 3.0)).collect();
    construct_self_adjoint_from_diag_metric(&DiagMetricSelfAdjointParams {
        omegas,
        a: real_normal(&mut rng, n, n),
        b: real_normal(&mut rng, n, n),
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pt_block_closure(seed in any::<u64>(), (m, n) in dims()) {
        let h = pt_block(seed, m, n);
        let p0 = make_diagonal_parity(m, n).unwrap();
        let r = check_symmetry(SymmetryKind::Pt, &p0, &h, &tol()).unwrap();
        prop_assert!(r.holds && r.residual < tol().abs_tol);
    }

    #[test]
    fn pseudo_block_closure(seed in any::<u64>(), (m, n) in dims()) {
        let mut rng = item_rng(seed, 1);
        let h = construct_pseudo_block(&PseudoBlockParams {
            a: hermitian_matrix(&mut rng, m),
            b: complex_matrix(&mut rng, m, n),
            d: hermitian_matrix(&mut rng, n),
        }, &tol()).unwrap();
        let p0 = make_diagonal_parity(m, n).unwrap();
        let r = check_symmetry(SymmetryKind::Pseudo, &p0, &h, &tol()).unwrap();
        prop_assert!(r.holds && r.residual < tol().abs_tol);
    }

    #[test]
    fn rotated_hermitian_closure(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = item_rng(seed, 2);
        let h = construct_rotated_hermitian(&RotatedHermitianParams {
            a: real_normal(&mut rng, n, n),
            b: real_normal(&mut rng, n, n),
        }).unwrap();
        let s = make_sip(n).unwrap();
        let r = check_symmetry(SymmetryKind::Pseudo, &s, &h, &tol()).unwrap();
        prop_assert!(r.holds && r.residual < tol().abs_tol);
    }

    #[test]
    fn gen_pt_diag_closure_and_pairing(seed in any::<u64>(), n in 1usize..6) {
        let (h, phases) = gen_pt_diag(seed, n);
        let op = InvolutionOperator::new(diag_phase_operator(&phases), InvolutionKind::AntilinearCore, &tol()).unwrap();
        let r = check_symmetry(SymmetryKind::GenPt, &op, &h, &tol()).unwrap();
        prop_assert!(r.holds && r.residual < tol().abs_tol);
        let ev = eigenvalues(&h, &tol()).unwrap();
        let conj: Vec<_> = ev.iter().map(|z| z.conj()).collect();
        prop_assert!(multiset_distance(&ev, &conj) <= 1e-7 * h.frobenius_norm().max(1.0));
    }

    #[test]
    fn self_adjoint_admits_gen_pt(seed in any::<u64>(), n in 1usize..6) {
        let h = self_adjoint(seed, n);
        let found = find_gen_pt_operator(&h, &tol()).unwrap();
        prop_assert!(found.is_found(), "{:?}", found);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn transport_covariance(seed in any::<u64>(), (m, n) in dims()) {
        let d = m + n;
        let p0 = make_diagonal_parity(m, n).unwrap();
        let mut rng = item_rng(seed, 7);

        let h = pt_block(seed, m, n);
        let r = well_conditioned_real(&mut rng, d, 0.6);
        let hp = h.similarity(&r).unwrap();
        let pp = transport(&p0, &r, &tol()).unwrap();
        prop_assert!(check_symmetry(SymmetryKind::Pt, &pp, &hp, &tol()).unwrap().holds);

        let hs = construct_pseudo_block(&PseudoBlockParams {
            a: hermitian_matrix(&mut rng, m),
            b: complex_matrix(&mut rng, m, n),
            d: hermitian_matrix(&mut rng, n),
        }, &tol()).unwrap();
        let u = unitary_matrix(&mut rng, d);
        let ph = p0.as_kind(InvolutionKind::HermitianInvolution, &tol()).unwrap();
        let moved = transport(&ph, &u, &tol()).unwrap();
        prop_assert!(check_symmetry(SymmetryKind::Pseudo, &moved, &hs.similarity(&u).unwrap(), &tol()).unwrap().holds);

        let (hg, phases) = gen_pt_diag(seed, d);
        let op = InvolutionOperator::new(diag_phase_operator(&phases), InvolutionKind::AntilinearCore, &tol()).unwrap();
        let lam = well_conditioned_complex(&mut rng, d, 0.6);
        let moved = transport(&op, &lam, &tol()).unwrap();
        prop_assert!(check_symmetry(SymmetryKind::GenPt, &moved, &hg.similarity(&lam).unwrap(), &tol()).unwrap().holds);
    }
}
