use causal_diamond::entanglement::{self, SeriesPlan, SweepGrid};
use causal_diamond::modes::SqueezingParameter;
use causal_diamond::oracle;
use causal_diamond::states::{self, FockTruncation, NmaxPolicy};
use proptest::prelude::*;

fn sq(r: f64) -> SqueezingParameter {
    SqueezingParameter::from_r(r).unwrap()
}

fn auto(s: &SqueezingParameter) -> SeriesPlan {
    SeriesPlan::new(s, NmaxPolicy::default()).unwrap()
}

fn pt_of(s: &SqueezingParameter, n_max: usize) -> (FockTruncation, states::BipartiteState) {
    let trunc = FockTruncation::fixed(s, n_max).unwrap();
    let pt = states::partial_transpose(&states::build_rho_ad(s, &trunc)).unwrap();
    (trunc, pt)
}

#[test]
fn log_negativity_is_log_trace_norm_of_dense_transpose() {
    for &(r, n_max) in &[(0.3, 40), (1.0, 120), (3.0, 400)] {
        let s = sq(r);
        let (trunc, pt) = pt_of(&s, n_max);
        let ev = entanglement::ppt_spectrum_oracle(&pt).unwrap();
        let dense = oracle::trace_norm(&ev).log2();
        let closed = entanglement::log_negativity(&s, &SeriesPlan::Finite(trunc)).unwrap();
        assert!((closed - dense).abs() < 1e-8, "r = {r}: {closed} vs {dense}");
    }
}

#[test]
fn closed_spectrum_matches_dense_at_moderate_cutoff() {
    let s = sq(0.6);
    let (trunc, pt) = pt_of(&s, 60);
    let dense = entanglement::ppt_spectrum_oracle(&pt).unwrap();
    let closed = entanglement::ppt_spectrum_closed_form(&s, &trunc).eigenvalues();
    assert_eq!(dense.len(), closed.len());
    let err = dense.iter().zip(&closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-12, "{err:e}");
}

#[test]
fn tiny_squeezing_against_dense() {
    let s = sq(1e-5);
    let (trunc, pt) = pt_of(&s, 6);
    let dense = entanglement::ppt_spectrum_oracle(&pt).unwrap();
    let closed = entanglement::ppt_spectrum_closed_form(&s, &trunc).eigenvalues();
    for (a, b) in dense.iter().zip(&closed) {
        assert!((a - b).abs() < 1e-14, "{a} vs {b}");
    }
    // the lone negative eigenvalue is close to -1/2
    assert!((closed[0] + 0.5).abs() < 1e-9);
}

#[test]
fn dave_entropy_matches_reduced_state() {
    let s = sq(0.8);
    let trunc = FockTruncation::auto(&s, 1e-14).unwrap();
    let dave = states::reduce_to_dave(&states::build_rho_ad(&s, &trunc)).unwrap();
    let (_, s_d, _) = entanglement::entropies(&s, &auto(&s)).unwrap();
    assert!((s_d - dave.entropy_bits()).abs() < 1e-10, "{s_d} vs {}", dave.entropy_bits());
    let (s_d_dense, s_ad_dense) = entanglement::entropies_oracle(&s, &trunc);
    let (_, _, s_ad) = entanglement::entropies(&s, &auto(&s)).unwrap();
    assert!((s_d - s_d_dense).abs() < 1e-10);
    assert!((s_ad - s_ad_dense).abs() < 1e-10);
}

#[test]
fn large_squeezing_limits() {
    let s = sq(8.0);
    let (trunc, _) = pt_of(&s, 4);
    let lambda0_block = entanglement::ppt_spectrum_closed_form(&s, &trunc).pairs[0].1;
    assert!(lambda0_block < 0.0 && lambda0_block.abs() < 1e-3, "{lambda0_block}");
    let rep = entanglement::report(&s, NmaxPolicy::default()).unwrap();
    assert!(rep.neg_log < 1e-3, "{}", rep.neg_log);
    assert!((rep.mutual_info - 1.0).abs() < 1e-3, "{}", rep.mutual_info);
}

#[test]
fn lifetime_sweep_is_a_reparametrisation() {
    let omega = 1.3;
    let lifetimes = vec![0.2, 0.9, 1.7, 4.0];
    let by_life = entanglement::sweep(
        &SweepGrid::Lifetimes { lifetimes: lifetimes.clone(), omega },
        NmaxPolicy::default(),
    )
    .unwrap();
    let rs = lifetimes
        .iter()
        .map(|&l| SqueezingParameter::from_omega_hat(omega * l / 2.0).unwrap().r())
        .collect();
    let by_r = entanglement::sweep(&SweepGrid::R(rs), NmaxPolicy::default()).unwrap();
    // from_omega_hat keeps tanh^2 r exact, from_r recomputes it: agreement is to rounding
    for (a, b) in by_life.iter().zip(&by_r) {
        let (a, b) = (a.as_ref().unwrap(), b.as_ref().unwrap());
        assert_eq!(a.r, b.r);
        assert_eq!(a.n_max_used, b.n_max_used);
        for (x, y) in [(a.neg_log, b.neg_log), (a.s_d, b.s_d), (a.s_ad, b.s_ad), (a.mutual_info, b.mutual_info)] {
            assert!((x - y).abs() <= 1e-13 * y.abs(), "{x} vs {y}");
        }
    }
}

#[test]
fn sweep_rejects_bad_grids() {
    assert!(entanglement::sweep(&SweepGrid::R(vec![]), NmaxPolicy::default()).is_err());
    assert!(entanglement::sweep(&SweepGrid::R(vec![0.5, -1.0]), NmaxPolicy::default()).is_err());
    assert!(entanglement::sweep(&SweepGrid::R(vec![f64::NAN]), NmaxPolicy::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn monotone_and_bounded(r in 0.0..6.0f64, dr in 0.01..1.0f64) {
        let (a, b) = (sq(r), sq(r + dr));
        let (ra, rb) = (
            entanglement::report(&a, NmaxPolicy::default()).unwrap(),
            entanglement::report(&b, NmaxPolicy::default()).unwrap(),
        );
        prop_assert!(rb.neg_log <= ra.neg_log + 1e-12);
        prop_assert!(rb.mutual_info <= ra.mutual_info + 1e-12);
        for rep in [ra, rb] {
            prop_assert!((0.0..=1.0).contains(&rep.neg_log));
            prop_assert!(rep.mutual_info >= 1.0 - 1e-12 && rep.mutual_info <= 2.0);
            prop_assert_eq!(rep.s_a, 1.0);
            prop_assert!(rep.s_d >= 1.0 - 1e-12 && rep.s_ad >= -1e-12);
            // I = S_A + S_D - S_AD
            prop_assert!((rep.mutual_info - (rep.s_a + rep.s_d - rep.s_ad)).abs() < 1e-9 * rep.s_d.max(1.0));
        }
    }

    #[test]
    fn log_negativity_from_negativity(r in 0.01..4.0f64) {
        let s = sq(r);
        let rep = entanglement::report(&s, NmaxPolicy::default()).unwrap();
        let want = (2.0 * rep.negativity + 1.0).log2();
        prop_assert!((rep.neg_log - want).abs() <= 2.0 * rep.tail_bound + 1e-14);
    }

    #[test]
    fn negative_eigenvalues_stay_negative(r in 0.01..4.0f64, n_max in 1usize..200) {
        let s = sq(r);
        // below this lambda_- ~ q^{n+1} underflows to zero
        prop_assume!((n_max as f64 + 1.0) * s.ln_tanh2() > -700.0);
        let trunc = FockTruncation::fixed(&s, n_max).unwrap();
        let spec = entanglement::ppt_spectrum_closed_form(&s, &trunc);
        prop_assert!(spec.pairs.iter().all(|&(p, m)| m < 0.0 && p > 0.0));
    }
}
