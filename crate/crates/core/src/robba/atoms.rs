//! Distinguished elements: q-levels, the partial products of t, partial
//! units and interpolating series.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::element::{Approx, RobbaElement};
use super::profile::Profile;
use crate::arith::{ppow, q_level_poly, q_level_poly_mod, QPoly, Q};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    X,
    T,
    QLevel(u32),
    TPlus(u32),
    TMinus(u32),
}

pub fn atom(name: &Atom, profile: Profile) -> Result<RobbaElement> {
    match name {
        Atom::X => Ok(RobbaElement::x(profile)),
        Atom::T => Ok(RobbaElement::t(profile)),
        Atom::QLevel(n) => q_level(*n, profile),
        Atom::TPlus(m) => t_plus(*m, profile),
        Atom::TMinus(m) => t_minus(*m, profile),
    }
}

/// `φ^{n-1}(q)` with `q = φ(X)/X`.
pub fn q_level(n: u32, profile: Profile) -> Result<RobbaElement> {
    if n == 0 {
        return Err(Error::Validation("q_level needs n >= 1".into()));
    }
    RobbaElement::from_poly(profile, q_level_poly(profile.p, n)).check_window()
}

fn truncated_product(levels: impl Iterator<Item = u32>, profile: Profile) -> RobbaElement {
    let keep = (profile.kmax + 1) as usize;
    let pinv = ppow(profile.p, -1);
    let mut acc = QPoly::one();
    let mut cut = false;
    for n in levels {
        let deg = (profile.p as usize - 1).saturating_mul((profile.p as usize).checked_pow(n - 1).unwrap_or(usize::MAX));
        cut |= acc.deg().unwrap_or(0).saturating_add(deg) >= keep;
        let f = q_level_poly_mod(profile.p, n, keep).scale(&pinv);
        let prod = &acc * &f;
        acc = QPoly::new(prod.coeffs().iter().take(keep).cloned().collect());
    }
    let approx = cut.then(|| Approx { high: Some(profile.kmax + 1), ..Default::default() });
    RobbaElement::from_parts(profile, vec![acc], QPoly::one(), approx)
}

/// `Π_{k=1}^{M} φ^{2k-1}(q)/p`, the first `M` even-indexed factors of `t/X`,
/// cut modulo `X^{kmax+1}`.
pub fn t_plus(m: u32, profile: Profile) -> Result<RobbaElement> {
    if m == 0 {
        return Err(Error::Validation("t_plus needs M >= 1".into()));
    }
    Ok(truncated_product((1..=m).map(|k| 2 * k), profile))
}

/// `Π_{k=1}^{M} φ^{2k-2}(q)/p`, the odd-indexed factors.
pub fn t_minus(m: u32, profile: Profile) -> Result<RobbaElement> {
    if m == 0 {
        return Err(Error::Validation("t_minus needs M >= 1".into()));
    }
    Ok(truncated_product((1..=m).map(|k| 2 * k - 1), profile))
}

/// `Π_{n=1}^{N} φ^{n-1}(q)/p`, cut modulo `X^{kmax+1}`.
pub fn t_over_x_partial(n: u32, profile: Profile) -> RobbaElement {
    truncated_product(1..=n, profile)
}

/// Minimal-degree `u` with `u ≡ 1 mod φ^{n-1}(q)^w` and `u ≡ 0 mod φ^{m-1}(q)^w`
/// for the other window levels `m`.
pub fn partial_unit(n: u32, w: u32, profile: Profile) -> Result<RobbaElement> {
    profile.check_level(n)?;
    if w == 0 {
        return Err(Error::Validation("partial_unit needs w >= 1".into()));
    }
    let p = profile.p;
    let qn = q_level_poly(p, n).pow(w as usize);
    let mut others = QPoly::one();
    for m in profile.levels().filter(|&m| m != n) {
        others = &others * &q_level_poly(p, m).pow(w as usize);
    }
    let (g, s, _) = QPoly::xgcd(&others, &qn);
    debug_assert_eq!(g, QPoly::one());
    let u = (&s * &others).rem(&(&others * &qn));
    if u.deg().unwrap_or(0) as i64 > profile.kmax {
        return Err(Error::WindowTooSmall(format!(
            "partial unit t_{{{n},{w}}} has degree {} > kmax = {}",
            u.deg().unwrap_or(0),
            profile.kmax
        )));
    }
    Ok(RobbaElement::from_poly(profile, u))
}

/// `Σ_n values[n] t_{n,1}` over the window levels.
pub fn interpolation_series(values: &BTreeMap<u32, Q>, profile: Profile) -> Result<RobbaElement> {
    let mut acc = RobbaElement::zero(profile);
    for n in profile.levels() {
        let v = values
            .get(&n)
            .ok_or_else(|| Error::Validation(format!("no value given for level {n}")))?;
        if v.is_zero() {
            continue;
        }
        acc = acc.add_raw(&partial_unit(n, 1, profile)?.scale(v));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qf};
    use crate::local_fields::{field, CycElem, TVal};

    fn pr12() -> Profile {
        Profile::default().with_levels(1, 2)
    }

    #[test]
    fn q_level_one() {
        let f = q_level(1, Profile::default()).unwrap();
        assert_eq!(f.as_poly().unwrap(), QPoly::from_ints(&[2, 1]));
    }

    #[test]
    fn partial_units_closed_forms() {
        let t11 = partial_unit(1, 1, pr12()).unwrap().as_poly().unwrap();
        assert_eq!(t11, QPoly::new(vec![q(1), q(1), qf(1, 2)]));
        let t21 = partial_unit(2, 1, pr12()).unwrap().as_poly().unwrap();
        assert_eq!(t21, QPoly::new(vec![q(0), q(-1), qf(-1, 2)]));
        assert_eq!(t11.eval(&q(-2)), q(1));
        let k = field(2, 2);
        let at = |f: &QPoly| CycElem::from_poly(&k, f);
        assert_eq!(at(&t11), CycElem::zero(&k));
        assert_eq!(at(&t21), CycElem::one(&k));
    }

    #[test]
    fn partial_unit_valuations() {
        for w in 1..=3 {
            for n in 1..=3 {
                let u = partial_unit(n, w, Profile::default()).unwrap();
                for m in 1..=3 {
                    let s = u.iota(m).unwrap();
                    let s = if m == n { s.sub(&crate::local_fields::TSeries::one(&s.field, s.trunc)) } else { s };
                    assert!(s.valuation().lower_bound() >= w as i64, "n={n} m={m} w={w}");
                }
            }
        }
    }

    #[test]
    fn interpolant_for_p_powers() {
        let vals = BTreeMap::from([(1, qf(1, 2)), (2, qf(1, 4))]);
        let a = interpolation_series(&vals, pr12()).unwrap().as_poly().unwrap();
        assert_eq!(a, QPoly::from_ints(&[4, 2, 1]).scale(&qf(1, 8)));
        let ones = BTreeMap::from([(1, q(1)), (2, q(1))]);
        let one = interpolation_series(&ones, pr12()).unwrap();
        for n in 1..=2 {
            let s = one.iota(n).unwrap();
            let d = s.sub(&crate::local_fields::TSeries::one(&s.field, s.trunc));
            assert!(d.valuation().lower_bound() >= 1);
        }
        let zeros = BTreeMap::from([(1, q(0)), (2, q(0))]);
        assert!(interpolation_series(&zeros, pr12()).unwrap().is_zero());
    }

    #[test]
    fn too_small_window() {
        let pr = Profile::default().with_window(-8, 16).with_t_prec(8);
        assert!(matches!(partial_unit(1, 3, pr), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn q_level_is_uniformizer() {
        let pr = Profile::default();
        for n in 1..=3 {
            assert_eq!(q_level(n, pr).unwrap().zero_order(n).unwrap(), TVal::Exact(1));
        }
    }

    #[test]
    fn even_odd_products() {
        let pr = Profile::default();
        let tp = t_plus(2, pr).unwrap();
        let tm = t_minus(2, pr).unwrap();
        assert_eq!(tm.frobenius_raw().expand().unwrap().c, tp.expand().unwrap().c);
    }
}
