use phigamma::arith::q;
use phigamma::construction::{det_slope_certificate, glue, recover_filtered, same_filtered};
use phigamma::corpus::{random_module, CorpusSpec};
use phigamma::filtered::{hn_slopes, is_admissible, FilteredModule};
use phigamma::membership::{membership, rank_one};
use phigamma::robba::{LogRobbaElement, Profile, RobbaElement};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn module(seed: u64, max_dim: usize) -> FilteredModule {
    let spec = CorpusSpec { max_dim, ..CorpusSpec::default() };
    random_module(&spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn pr12() -> Profile {
    Profile::default().with_levels(1, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn slopes_are_ordered_and_sum_to_degree(seed in any::<u64>()) {
        let d = module(seed, 3);
        let r = hn_slopes(&d).unwrap();
        prop_assert_eq!(r.slopes.len(), d.dim());
        prop_assert!(r.slopes.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(r.steps.windows(2).all(|w| w[0].slope < w[1].slope));
        prop_assert_eq!(r.sum(), d.t_n() - q(d.t_h()));
        prop_assert_eq!(is_admissible(&d).unwrap().admissible, r.all_zero());
    }

    #[test]
    fn certificate_matches_degree(seed in any::<u64>()) {
        let d = module(seed, 2);
        let m = glue(&d, pr12()).unwrap();
        prop_assert_eq!(det_slope_certificate(&m).unwrap(), d.t_n() - q(d.t_h()));
    }

    #[test]
    fn recovery_inverts_gluing(seed in any::<u64>()) {
        let d = module(seed, 2);
        let back = recover_filtered(&glue(&d, pr12()).unwrap()).unwrap();
        prop_assert!(same_filtered(&d, &back));
    }

    #[test]
    fn members_stable_under_bounded_units(nu in -2i64..=2, c in 1i64..=5) {
        let pr = Profile::default();
        let data = rank_one(2, nu, nu).unwrap();
        // c t^{-ν} is the basic member for φ = p^ν with its jump at ν
        let x = LogRobbaElement::constant(pr, q(c)).div_t(nu.max(0) as u32).mul_t((-nu).max(0) as u32);
        let v = membership(&[x.clone()], &data, pr).unwrap();
        prop_assert!(v.member, "{:?}", v.failures());
        let u = RobbaElement::from_parts(pr, vec![phigamma::arith::QPoly::one()], phigamma::arith::QPoly::from_ints(&[1, 1]), None);
        prop_assert!(u.is_bounded().unwrap());
        let ux = x.mul_robba(&u);
        prop_assert!(membership(&[ux], &data, pr).unwrap().member);
        // one more power of t breaks the growth bound
        prop_assert!(!membership(&[x.mul_t(1)], &data, pr).unwrap().member);
    }
}
