use phigamma::arith::{q, QPoly, Q};
use phigamma::local_fields::{field, TVal};
use phigamma::robba::atoms::partial_unit;
use phigamma::robba::{LogRobbaElement, Profile, RobbaElement};
use proptest::prelude::*;

fn profile() -> Profile {
    Profile::default().with_levels(1, 3).with_t_prec(6)
}

fn small_q() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| Q::new(a.into(), b.into()))
}

fn poly(max_deg: usize) -> impl Strategy<Value = QPoly> {
    prop::collection::vec(small_q(), 1..=max_deg + 1).prop_map(QPoly::new)
}

/// Exact window elements: `(A + t B) / X^k`.
fn element() -> impl Strategy<Value = RobbaElement> {
    (poly(5), poly(3), 0usize..=2).prop_map(|(a, b, k)| {
        RobbaElement::from_parts(profile(), vec![a, b], QPoly::monomial(q(1), k), None)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn iota_intertwines_frobenius(f in element(), n in 1u32..=2) {
        let lhs = f.frobenius().unwrap().iota(n + 1).unwrap();
        let rhs = f.iota(n).unwrap().lift(&field(2, n + 1));
        let tt = profile().t_prec.min(lhs.trunc).min(rhs.trunc);
        prop_assert!(lhs.eq_mod(&rhs, tt));
    }

    #[test]
    fn frobenius_commutes_with_gamma(f in element(), a in prop::sample::select(vec![-3i64, -1, 3, 5])) {
        let a = q(a);
        let lhs = f.frobenius().unwrap().gamma_act(&a).unwrap();
        let rhs = f.gamma_act(&a).unwrap().frobenius().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn nabla_is_a_derivation(f in element(), g in element()) {
        let lhs = f.mul_raw(&g).nabla();
        let rhs = f.nabla().mul_raw(&g).add_raw(&f.mul_raw(&g.nabla()));
        prop_assert!(lhs.sub_raw(&rhs).is_zero());
    }

    #[test]
    fn zero_orders_add(f in element(), g in element(), n in 1u32..=3) {
        let (a, b) = (f.zero_order(n).unwrap(), g.zero_order(n).unwrap());
        if let (TVal::Exact(a), TVal::Exact(b)) = (a, b) {
            if a + b < profile().t_prec {
                prop_assert_eq!(f.mul_raw(&g).zero_order(n).unwrap(), TVal::Exact(a + b));
            }
        }
    }

    #[test]
    fn ord_invariant_under_unit_scaling(f in element(), u in prop::sample::select(vec![1i64, -1, 3, 5, -7])) {
        let a = f.ord_estimate().unwrap();
        let b = f.scale(&q(u)).ord_estimate().unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn log_leibniz(f in element(), g in element(), i in 0u32..=2, m in 0u32..=2) {
        let pr = profile();
        let l = LogRobbaElement::ell(pr);
        let a = LogRobbaElement::from_robba(f).mul(&l.pow(i)).div_t(m);
        let b = LogRobbaElement::from_robba(g).add(&l);
        let lhs = a.mul(&b).nabla();
        let rhs = a.nabla().mul(&b).add(&a.mul(&b.nabla()));
        prop_assert!(lhs.sub(&rhs).is_zero());
    }
}

#[test]
fn q_levels_are_uniformizers() {
    let pr = profile();
    for n in pr.levels() {
        let ql = RobbaElement::from_poly(pr, phigamma::arith::q_level_poly(2, n));
        assert_eq!(ql.zero_order(n).unwrap(), TVal::Exact(1));
    }
}

#[test]
fn partial_units_at_p3() {
    let pr = Profile::default().with_p(3).with_window(-8, 200).with_levels(1, 3).with_t_prec(6);
    for w in 1..=3 {
        for n in 1..=3 {
            let u = partial_unit(n, w, pr).unwrap();
            for m in 1..=3 {
                let mut s = u.iota(m).unwrap();
                if m == n {
                    s = s.sub(&phigamma::local_fields::TSeries::one(&s.field, s.trunc));
                }
                assert!(s.valuation().lower_bound() >= w as i64, "n={n} m={m} w={w}");
            }
        }
    }
}
