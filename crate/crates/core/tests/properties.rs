//! Randomized invariants. Each case draws its inputs from a proptest-chosen
//! seed, so shrinking reports a reproducible seed.

use proptest::prelude::*;

use asymq::channels::{channel_output, det_weight_sum, random_tp_separable_instrument};
use asymq::linalg::{
    det, ginibre, haar_unitary, kron, partial_trace, partial_transpose, random_density_matrix, random_pure_vector,
    seeded_rng, trace_distance,
};
use asymq::measures::{g_pure, wootters_concurrence};
use asymq::states::{apply_swap, local_spectra, schmidt};
use asymq::{BipartiteState, Side, C64};

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_is_associative(seed in any::<u64>(), m in 1usize..4, n in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let (a, b, c) = (ginibre(m, n, &mut rng), ginibre(n, m, &mut rng), ginibre(2, 2, &mut rng));
        let left = kron(&kron(&a, &b).unwrap(), &c).unwrap();
        let right = kron(&a, &kron(&b, &c).unwrap()).unwrap();
        prop_assert!((&left - &right).max_abs() < 1e-13);
    }

    #[test]
    fn det_of_kron(seed in any::<u64>(), m in 1usize..4, n in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let (a, b) = (ginibre(m, m, &mut rng), ginibre(n, n, &mut rng));
        let lhs = det(&kron(&a, &b).unwrap()).unwrap();
        let rhs = det(&a).unwrap().powu(n as u32) * det(&b).unwrap().powu(m as u32);
        prop_assert!(close(lhs, rhs, 1e-9), "{lhs} vs {rhs}");
    }

    #[test]
    fn partial_trace_inverts_product(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let a = random_density_matrix(da, da, &mut rng);
        let b = random_density_matrix(db, db, &mut rng);
        let ab = kron(&a, &b).unwrap();
        prop_assert!((&partial_trace(&ab, da, db, Side::A).unwrap() - &a).max_abs() < 1e-13);
        prop_assert!((&partial_trace(&ab, da, db, Side::B).unwrap() - &b).max_abs() < 1e-13);
    }

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let rho = random_density_matrix(da * db, 2, &mut rng);
        for side in [Side::A, Side::B] {
            let pt = partial_transpose(&rho, da, db, side).unwrap();
            prop_assert!(close(pt.trace(), rho.trace(), 1e-13));
            let back = partial_transpose(&pt, da, db, side).unwrap();
            prop_assert_eq!(&back, &rho);
        }
    }

    #[test]
    fn trace_distance_contracts_under_separable_channels(seed in any::<u64>(), k in 1usize..5) {
        let mut rng = seeded_rng(seed);
        let rho = BipartiteState::mixed(2, 2, random_density_matrix(4, 2, &mut rng)).unwrap();
        let sigma = BipartiteState::mixed(2, 2, random_density_matrix(4, 3, &mut rng)).unwrap();
        let ins = random_tp_separable_instrument(2, k, &mut rng);
        let before = trace_distance(rho.raw(), sigma.raw()).unwrap();
        let after = trace_distance(&channel_output(&ins, &rho).unwrap(), &channel_output(&ins, &sigma).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-12, "{after} > {before}");
    }

    #[test]
    fn det_weights_of_tp_instruments_stay_below_one(seed in any::<u64>(), d in 2usize..4, k in 1usize..7) {
        let mut rng = seeded_rng(seed);
        let ins = random_tp_separable_instrument(d, k, &mut rng);
        prop_assert!(det_weight_sum(&ins, d).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn g_is_bounded_and_lu_invariant(seed in any::<u64>(), d in 2usize..4) {
        let mut rng = seeded_rng(seed);
        let psi = BipartiteState::pure(d, d, random_pure_vector(d * d, &mut rng)).unwrap();
        let g = g_pure(&psi).unwrap().value;
        prop_assert!((0.0..=1.0 + 1e-12).contains(&g));
        let u = kron(&haar_unitary(d, &mut rng), &haar_unitary(d, &mut rng)).unwrap();
        let v = psi.vector().unwrap();
        let rotated: Vec<C64> = (0..d * d).map(|r| u.row(r).iter().zip(v).map(|(a, b)| a * b).sum()).collect();
        let g2 = g_pure(&BipartiteState::pure(d, d, rotated).unwrap()).unwrap().value;
        prop_assert!((g - g2).abs() < 1e-10);
    }

    #[test]
    fn schmidt_reconstructs_the_vector(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let psi = BipartiteState::pure(da, db, random_pure_vector(da * db, &mut rng)).unwrap();
        let s = schmidt(&psi).unwrap();
        let err = s.reconstruct().iter().zip(psi.vector().unwrap()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
        let norm: f64 = s.coefficients.iter().map(|c| c * c).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn swap_exchanges_local_spectra(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let rho = BipartiteState::mixed(da, db, random_density_matrix(da * db, 2, &mut rng)).unwrap();
        let s = apply_swap(&rho);
        prop_assert_eq!(s.dims(), (db, da));
        let ((a, b), (sa, sb)) = (local_spectra(&rho), local_spectra(&s));
        prop_assert!(a.matches(&sb, 1e-12) && b.matches(&sa, 1e-12));
        let back = apply_swap(&s);
        prop_assert_eq!(back.raw(), rho.raw());
    }

    #[test]
    fn concurrence_is_bounded_and_lu_invariant(seed in any::<u64>(), rank in 1usize..5) {
        let mut rng = seeded_rng(seed);
        let rho = BipartiteState::mixed(2, 2, random_density_matrix(4, rank, &mut rng)).unwrap();
        let c = wootters_concurrence(&rho).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
        let u = kron(&haar_unitary(2, &mut rng), &haar_unitary(2, &mut rng)).unwrap();
        let r2 = BipartiteState::mixed(2, 2, u.conjugate(rho.raw()).hermitian_part()).unwrap();
        prop_assert!((wootters_concurrence(&r2).unwrap() - c).abs() < 1e-9);
    }

    #[test]
    fn state_json_round_trips_exactly(seed in any::<u64>(), da in 1usize..4, db in 1usize..4, pure in any::<bool>()) {
        let mut rng = seeded_rng(seed);
        let s = if pure {
            BipartiteState::pure(da, db, random_pure_vector(da * db, &mut rng)).unwrap()
        } else {
            BipartiteState::mixed(da, db, random_density_matrix(da * db, 2, &mut rng)).unwrap()
        };
        prop_assert_eq!(BipartiteState::from_json(&s.to_json()).unwrap(), s);
    }
}
