use icregime::model::{GaussianIC, RateVector, TwoOutputSystem, UserSet};
use icregime::regimes::{
    degraded_equivalent, gaussian_kuser_check, kuser_regime_gains, ratio_condition_check,
};
use icregime::regions::{
    membership, region_full, region_simplified, slice, support_by_simplex, support_by_vertices, vertices,
};
use proptest::prelude::*;

/// Rate bound of subset `s` at receiver `j` with unit powers and unit noise.
fn mac_bound(gains: &[Vec<f64>], j: usize, s: UserSet) -> f64 {
    let snr: f64 = s.iter().map(|i| gains[j][i] * gains[j][i]).sum();
    0.5 * (1.0 + snr).log2()
}

fn free_gain() -> impl Strategy<Value = f64> {
    (1.0f64..3.0, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m })
}

fn regime_free() -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![prop::collection::vec(free_gain(), 3), prop::collection::vec(free_gain(), 4)]
}

fn any_gains(k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, k), k).prop_map(|mut g| {
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regime_channels_have_equal_full_and_simplified_regions(free in regime_free()) {
        let gains = kuser_regime_gains(&free);
        let ic = GaussianIC::with_unit_powers(gains.clone()).unwrap();
        prop_assert!(gaussian_kuser_check(&ic, 0).unwrap().pass);
        let full = region_full(&ic).unwrap();
        let simp = region_simplified(&ic).unwrap();
        for s in full.subsets() {
            let everyone = (0..ic.k()).map(|j| mac_bound(&gains, j, s)).fold(f64::INFINITY, f64::min);
            let inside = s.iter().map(|j| mac_bound(&gains, j, s)).fold(f64::INFINITY, f64::min);
            prop_assert!((full.bound(s) - everyone).abs() < 1e-9);
            prop_assert!((simp.bound(s) - inside).abs() < 1e-9);
            prop_assert!((full.bound(s) - simp.bound(s)).abs() < 1e-9);
        }
    }

    #[test]
    fn simplified_region_contains_full_region(gains in any_gains(3)) {
        let ic = GaussianIC::with_unit_powers(gains).unwrap();
        let full = region_full(&ic).unwrap();
        let simp = region_simplified(&ic).unwrap();
        for s in full.subsets() {
            prop_assert!(full.bound(s) <= simp.bound(s) + 1e-12);
        }
    }

    #[test]
    fn vertices_are_members_and_support_paths_agree(gains in any_gains(3), d in prop::collection::vec(0.01f64..1.0, 3)) {
        let ic = GaussianIC::with_unit_powers(gains).unwrap();
        let region = region_full(&ic).unwrap();
        let vs = vertices(&region).unwrap();
        prop_assert!(!vs.is_empty());
        for v in &vs {
            let loose = RateVector::new(v.rates().iter().map(|r| (r - 1e-9).max(0.0)).collect()).unwrap();
            prop_assert!(membership(&region, &loose).unwrap().inside);
        }
        let a = support_by_vertices(&region, &d).unwrap();
        let b = support_by_simplex(&region, &d).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn slice_corners_lie_in_the_region(gains in any_gains(3), t in 0.0f64..1.0) {
        let ic = GaussianIC::with_unit_powers(gains).unwrap();
        let region = region_full(&ic).unwrap();
        let fixed = t * region.coordinate_cap(2);
        for p in slice(&region, &[(2, fixed)]).unwrap() {
            let r = RateVector::new(vec![(p[0] - 1e-9).max(0.0), (p[1] - 1e-9).max(0.0), fixed]).unwrap();
            prop_assert!(membership(&region, &r).unwrap().inside);
        }
    }

    #[test]
    fn check_and_construction_agree(
        mu1 in 1usize..4,
        mu2 in 0usize..3,
        alpha in prop_oneof![-1.0f64..-0.01, 0.01f64..1.0],
        b in prop::collection::vec(prop_oneof![-3.0f64..-0.1, 0.1f64..3.0], 6),
        extra in prop::collection::vec(-3.0f64..3.0, 3),
    ) {
        let b: Vec<f64> = b[..mu1 + mu2].to_vec();
        let mut a: Vec<f64> = b[..mu1].iter().map(|x| alpha * x).collect();
        a.extend_from_slice(&extra[..mu2]);
        let sys = TwoOutputSystem::new(mu1, mu2, a.clone(), b.clone()).unwrap();
        let check = ratio_condition_check(&sys);
        prop_assert!(check.pass);
        prop_assert!((check.alpha.unwrap() - alpha).abs() < 1e-12);
        let d = degraded_equivalent(&sys).unwrap();
        for (got, want) in d.conditional_mean_coeffs(&sys).iter().zip(&a) {
            prop_assert!((got - want).abs() < 1e-12);
        }
        prop_assert!((d.conditional_variance() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn construction_refuses_what_the_check_rejects(
        alpha in 1.05f64..4.0,
        b in prop::collection::vec(0.1f64..3.0, 2),
        skew in 1.1f64..2.0,
    ) {
        let too_big = TwoOutputSystem::new(2, 0, vec![alpha * b[0], alpha * b[1]], b.clone()).unwrap();
        prop_assert!(!ratio_condition_check(&too_big).pass);
        prop_assert!(degraded_equivalent(&too_big).is_err());
        let unequal = TwoOutputSystem::new(2, 0, vec![0.5 * b[0], 0.5 * skew * b[1]], b).unwrap();
        prop_assert!(ratio_condition_check(&unequal).alpha.is_none());
        prop_assert!(degraded_equivalent(&unequal).is_err());
    }
}
