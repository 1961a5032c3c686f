//! K_n = Q_p(ζ_{p^n}) on the power basis of π_n = ζ_{p^n} - 1.
//!
//! Coefficients are exact rationals, so every element is an exact element of
//! Q(ζ_{p^n}) ⊂ K_n.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::arith::{fmt_q, q, q_level_poly, qf, vp, QPoly, Q};
use crate::error::{Error, Result};
use crate::linalg::{Field, Ring};

#[derive(Debug, PartialEq, Eq)]
pub struct CycField {
    pub p: u64,
    pub n: u32,
    /// Ramification index `p^{n-1}(p-1)`.
    pub e: usize,
    /// Minimal polynomial of π_n.
    pub modulus: QPoly,
}

/// Shared field descriptor for level `n`.
pub fn field(p: u64, n: u32) -> Arc<CycField> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Arc<CycField>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut g = cache.lock().expect("field cache poisoned");
    g.entry((p, n))
        .or_insert_with(|| {
            let modulus = q_level_poly(p, n);
            Arc::new(CycField { p, n, e: modulus.deg().unwrap(), modulus })
        })
        .clone()
}

#[derive(Clone)]
pub struct CycElem {
    pub field: Arc<CycField>,
    pub c: Vec<Q>,
}

impl PartialEq for CycElem {
    fn eq(&self, o: &Self) -> bool {
        self.field.n == o.field.n && self.field.p == o.field.p && self.c == o.c
    }
}

impl fmt::Debug for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| match i {
                0 => fmt_q(x),
                1 => format!("({})π", fmt_q(x)),
                _ => format!("({})π^{}", fmt_q(x), i),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl CycElem {
    pub fn from_poly(field: &Arc<CycField>, poly: &QPoly) -> Self {
        let r = if poly.deg().is_some_and(|d| d >= field.e) {
            poly.rem(&field.modulus)
        } else {
            poly.clone()
        };
        let mut c = r.coeffs().to_vec();
        c.resize(field.e, Q::zero());
        CycElem { field: field.clone(), c }
    }

    pub fn from_q(field: &Arc<CycField>, x: Q) -> Self {
        Self::from_poly(field, &QPoly::constant(x))
    }

    pub fn zero(field: &Arc<CycField>) -> Self {
        Self::from_q(field, Q::zero())
    }

    pub fn one(field: &Arc<CycField>) -> Self {
        Self::from_q(field, Q::one())
    }

    /// The uniformizer π_n.
    pub fn pi(field: &Arc<CycField>) -> Self {
        Self::from_poly(field, &QPoly::x())
    }

    /// ζ_{p^n} = 1 + π_n.
    pub fn zeta(field: &Arc<CycField>) -> Self {
        Self::from_poly(field, &QPoly::from_ints(&[1, 1]))
    }

    pub fn level(&self) -> u32 {
        self.field.n
    }

    pub fn as_poly(&self) -> QPoly {
        QPoly::new(self.c.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// The element is a rational number; returns it.
    pub fn as_rational(&self) -> Option<Q> {
        self.c[1..].iter().all(|x| x.is_zero()).then(|| self.c[0].clone())
    }

    fn same(&self, o: &Self) -> Result<()> {
        if self.field.n != o.field.n || self.field.p != o.field.p {
            Err(Error::LevelMismatch(self.field.n, o.field.n))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        Ok(self.add_el(o))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        Ok(self.mul_el(o))
    }

    pub fn scale(&self, a: &Q) -> Self {
        CycElem { field: self.field.clone(), c: self.c.iter().map(|x| x * a).collect() }
    }

    pub fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (g, s, _) = QPoly::xgcd(&self.as_poly(), &self.field.modulus);
        debug_assert_eq!(g, QPoly::one());
        Ok(Self::from_poly(&self.field, &s))
    }

    /// Normalized valuation `min_i v_p(c_i) + i/e`, with `v(p) = 1`.
    pub fn valuation(&self) -> Result<Q> {
        let e = self.field.e as i64;
        self.c
            .iter()
            .enumerate()
            .filter_map(|(i, x)| vp(self.field.p, x).map(|v| q(v) + qf(i as i64, e)))
            .min()
            .ok_or(Error::IndeterminateZero)
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = Self::one(&self.field);
        for _ in 0..k {
            acc = acc.mul_el(self);
        }
        acc
    }

    /// Image under the map K_n → K_{n+1} sending ζ_{p^n} to ζ_{p^{n+1}}^p.
    pub fn lift(&self, up: &Arc<CycField>) -> Self {
        assert_eq!(up.n, self.field.n + 1);
        // π_n = (1 + π_{n+1})^p - 1
        let img = crate::arith::one_plus_x_pow_minus_one(self.field.p);
        Self::from_poly(up, &self.as_poly().compose(&img))
    }
}

impl Ring for CycElem {
    fn zero_like(&self) -> Self {
        Self::zero(&self.field)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.field)
    }
    fn is_zero_el(&self) -> bool {
        self.is_zero()
    }
    fn add_el(&self, o: &Self) -> Self {
        CycElem {
            field: self.field.clone(),
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }
    fn sub_el(&self, o: &Self) -> Self {
        CycElem {
            field: self.field.clone(),
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }
    fn mul_el(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return self.zero_like();
        }
        if let Some(a) = self.as_rational() {
            return o.scale(&a);
        }
        if let Some(b) = o.as_rational() {
            return self.scale(&b);
        }
        Self::from_poly(&self.field, &(&self.as_poly() * &o.as_poly()))
    }
}

impl Field for CycElem {
    fn inv_el(&self) -> Self {
        self.try_inv().expect("inverse of zero")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pi2_squared() {
        let k = field(2, 2);
        let pi = CycElem::pi(&k);
        let sq = pi.mul_el(&pi);
        assert_eq!(sq.c, vec![q(-2), q(-2)]);
    }

    #[test]
    fn inverse_of_pi2() {
        let k = field(2, 2);
        let pi = CycElem::pi(&k);
        let inv = pi.try_inv().unwrap();
        assert_eq!(inv.c, vec![q(-1), qf(-1, 2)]);
        assert_eq!(pi.mul_el(&inv), CycElem::one(&k));
        assert_eq!(CycElem::one(&k).try_inv().unwrap(), CycElem::one(&k));
    }

    #[test]
    fn valuations() {
        assert_eq!(CycElem::pi(&field(2, 2)).valuation().unwrap(), qf(1, 2));
        assert_eq!(CycElem::pi(&field(2, 1)).valuation().unwrap(), q(1));
        assert_eq!(CycElem::pi(&field(3, 1)).valuation().unwrap(), qf(1, 2));
        assert_eq!(CycElem::pi(&field(2, 1)).c, vec![q(-2)]);
        assert_eq!(CycElem::zero(&field(2, 2)).valuation(), Err(Error::IndeterminateZero));
        assert_eq!(CycElem::from_q(&field(3, 2), qf(5, 9)).valuation().unwrap(), q(-2));
    }

    #[test]
    fn zeta_has_order_p_power() {
        let k = field(3, 2);
        let z = CycElem::zeta(&k);
        assert_eq!(z.pow(9), CycElem::one(&k));
        assert_ne!(z.pow(3), CycElem::one(&k));
    }

    #[test]
    fn lift_is_multiplicative() {
        let k1 = field(2, 2);
        let k2 = field(2, 3);
        let a = CycElem::from_poly(&k1, &QPoly::from_ints(&[3, 1]));
        let b = CycElem::from_poly(&k1, &QPoly::from_ints(&[1, -2]));
        assert_eq!(a.mul_el(&b).lift(&k2), a.lift(&k2).mul_el(&b.lift(&k2)));
        assert_eq!(CycElem::zeta(&k1).lift(&k2), CycElem::zeta(&k2).pow(2));
    }

    #[test]
    fn level_mismatch() {
        let a = CycElem::one(&field(2, 1));
        let b = CycElem::one(&field(2, 2));
        assert_eq!(a.try_add(&b), Err(Error::LevelMismatch(1, 2)));
    }

    fn arb_elem(p: u64, n: u32) -> impl Strategy<Value = CycElem> {
        let e = field(p, n).e;
        proptest::collection::vec((-20i64..20, 1i64..9), e).prop_map(move |v| CycElem {
            field: field(p, n),
            c: v.into_iter().map(|(a, b)| qf(a, b)).collect(),
        })
    }

    proptest! {
        #[test]
        fn valuation_of_inverse(x in arb_elem(2, 3)) {
            prop_assume!(!x.is_zero());
            let y = x.try_inv().unwrap();
            prop_assert_eq!(x.mul_el(&y), CycElem::one(&x.field));
            prop_assert_eq!(x.valuation().unwrap() + y.valuation().unwrap(), q(0));
        }

        #[test]
        fn valuation_multiplicative(x in arb_elem(3, 2), y in arb_elem(3, 2)) {
            prop_assume!(!x.is_zero() && !y.is_zero());
            let v = x.mul_el(&y).valuation().unwrap();
            prop_assert_eq!(v, x.valuation().unwrap() + y.valuation().unwrap());
        }

        #[test]
        fn rational_valuation_agrees(a in -500i64..500, b in 1i64..500) {
            prop_assume!(a != 0);
            let x = CycElem::from_q(&field(2, 2), qf(a, b));
            prop_assert_eq!(x.valuation().unwrap(), q(vp(2, &qf(a, b)).unwrap()));
        }
    }
}
