use causal_diamond::modes::SqueezingParameter;
use causal_diamond::oracle;
use causal_diamond::states::{self, FockTruncation, NmaxPolicy, StatesError};
use proptest::prelude::*;

fn sq(r: f64) -> SqueezingParameter {
    SqueezingParameter::from_r(r).unwrap()
}

#[test]
fn partial_transpose_matches_dense_index_swap() {
    for &(r, n_max) in &[(0.2, 6), (0.8, 20), (1.5, 40)] {
        let s = sq(r);
        let trunc = FockTruncation::fixed(&s, n_max).unwrap();
        let pt = states::partial_transpose(&states::build_rho_ad(&s, &trunc)).unwrap();
        let dave_dim = n_max + 2;
        let dense = oracle::partial_transpose_dense(&oracle::rho_ad_dense(&s, &trunc), dave_dim);
        let idx = oracle::pt_complete_indices(n_max);
        let (got, want) = (oracle::restrict(&pt.to_dense(), &idx), oracle::restrict(&dense, &idx));
        let err = (got - want).amax();
        assert!(err < 1e-15, "r = {r}: entrywise error {err:e}");
    }
}

#[test]
fn block_rho_matches_dense_construction() {
    let s = sq(0.7);
    let trunc = FockTruncation::fixed(&s, 25).unwrap();
    let err = (states::build_rho_ad(&s, &trunc).to_dense() - oracle::rho_ad_dense(&s, &trunc)).amax();
    assert!(err < 1e-15);
}

#[test]
fn partial_transpose_has_a_negative_eigenvalue() {
    let s = sq(1.0);
    let trunc = FockTruncation::fixed(&s, 30).unwrap();
    let pt = states::partial_transpose(&states::build_rho_ad(&s, &trunc)).unwrap();
    let ev = oracle::symmetric_eigenvalues(&pt.to_dense());
    assert!(ev[0] < -1e-3);
}

#[test]
fn wrong_representation_is_rejected() {
    let s = sq(0.5);
    let trunc = FockTruncation::fixed(&s, 4).unwrap();
    let pt = states::partial_transpose(&states::build_rho_ad(&s, &trunc)).unwrap();
    assert!(matches!(states::reduce_to_dave(&pt), Err(StatesError::WrongRepresentation { .. })));
    assert!(matches!(states::partial_transpose(&pt), Err(StatesError::WrongRepresentation { .. })));
}

#[test]
fn auto_cutoff_is_capped() {
    let s = sq(6.0);
    assert!(matches!(
        FockTruncation::new(&s, NmaxPolicy::default()),
        Err(StatesError::TruncationTooSmall { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn rho_is_a_state_within_the_tail(r in 0.0..2.5f64, tol_exp in 4..13i32) {
        let s = sq(r);
        let tol = 10f64.powi(-tol_exp);
        let trunc = FockTruncation::auto(&s, tol).unwrap();
        prop_assert!(trunc.tail_bound <= tol);
        let state = states::build_rho_ad(&s, &trunc);
        // the rho tail is exact; the bound also covers the partial transpose
        let missing = 1.0 - state.trace();
        prop_assert!((missing - states::rho_ad_tail(&s, trunc.n_max)).abs() < 1e-14);
        prop_assert!(missing <= trunc.tail_bound + 1e-15);
        prop_assert!(state.rho_spectrum().unwrap().iter().all(|&x| x >= -1e-15));
        let alice = states::reduce_to_alice(&state).unwrap();
        prop_assert!((alice.weights[0] - 0.5).abs() <= trunc.tail_bound + 1e-15);
        prop_assert!((alice.weights[1] - 0.5).abs() <= trunc.tail_bound + 1e-15);
        let dave = states::reduce_to_dave(&state).unwrap();
        prop_assert!(dave.weights.iter().all(|&w| w >= 0.0));
        prop_assert!((dave.total() - state.trace()).abs() < 1e-14);
    }

    #[test]
    fn dense_rho_is_psd(r in 0.0..2.0f64, n_max in 1usize..40) {
        let s = sq(r);
        let trunc = FockTruncation::fixed(&s, n_max).unwrap();
        let ev = oracle::symmetric_eigenvalues(&oracle::rho_ad_dense(&s, &trunc));
        prop_assert!(ev[0] >= -1e-12, "{}", ev[0]);
    }

    #[test]
    fn tail_bound_is_monotone_in_cutoff(r in 0.05..3.0f64, n in 1usize..500) {
        let s = sq(r);
        prop_assert!(states::truncation_tail(&s, n + 1) <= states::truncation_tail(&s, n));
        prop_assert!(states::partial_transpose_tail(&s, n) >= states::rho_ad_tail(&s, n));
    }
}
