//! Window estimate of the growth order of a series.

use std::fmt;

use num_traits::{ToPrimitive, Zero};

use super::element::{Laurent, RobbaElement};
use crate::arith::{q, vp, Q};
use crate::error::Result;

/// `ord` estimate; always limited by the coefficient window.
#[derive(Clone, Debug, PartialEq)]
pub struct OrdEstimate {
    pub value: f64,
    /// Exact value when the maximizing index is a power of p (or the max is 0).
    pub exact: Option<Q>,
    pub kmax: i64,
}

impl OrdEstimate {
    fn constant(v: Q, kmax: i64) -> Self {
        OrdEstimate { value: v.to_f64().unwrap_or(f64::NAN), exact: Some(v), kmax }
    }

    pub fn neg_infinity(kmax: i64) -> Self {
        OrdEstimate { value: f64::NEG_INFINITY, exact: None, kmax }
    }

    pub fn shift(&self, k: i64) -> Self {
        OrdEstimate {
            value: self.value + k as f64,
            exact: self.exact.as_ref().map(|e| e + q(k)),
            kmax: self.kmax,
        }
    }

    pub fn max(self, o: Self) -> Self {
        if o.value > self.value + 1e-12 {
            o
        } else if self.value > o.value + 1e-12 {
            self
        } else {
            OrdEstimate { exact: self.exact.clone().or(o.exact), ..self }
        }
    }

    /// `self ≤ bound` with exact comparison when available.
    pub fn le(&self, bound: &Q) -> bool {
        match &self.exact {
            Some(e) => e <= bound,
            None => self.value <= bound.to_f64().unwrap_or(f64::NAN) + 1e-9,
        }
    }
}

impl fmt::Display for OrdEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(e) => write!(f, "{}", crate::arith::fmt_q(e))?,
            None if self.value.is_infinite() => write!(f, "-inf")?,
            None => write!(f, "{:.6}", self.value)?,
        }
        write!(f, " (window-limited)")
    }
}

fn log_p_power(p: u64, i: i64) -> Option<i64> {
    let mut x = i;
    let mut m = 0;
    while x > 1 {
        if x % p as i64 != 0 {
            return None;
        }
        x /= p as i64;
        m += 1;
    }
    Some(m)
}

/// Estimator on the nonnegative coefficients `a_0..a_kmax` of one series.
pub fn ord_of_coeffs(l: &Laurent, p: u64) -> OrdEstimate {
    let kmax = l.kmax();
    if l.c.iter().all(|x| x.is_zero()) {
        return OrdEstimate::neg_infinity(kmax);
    }
    let v = |i: i64| vp(p, &l.coeff(i));
    let c0 = [v(0), v(1)].into_iter().flatten().fold(0, i64::min);
    let mut best = 0.0f64;
    let mut exact = Some(Q::zero());
    for i in 2..=kmax {
        let Some(vi) = v(i) else { continue };
        let num = (c0 - vi) as f64;
        let s = num / ((i as f64).ln() / (p as f64).ln());
        if s > best + 1e-12 {
            best = s;
            exact = log_p_power(p, i).map(|m| Q::new((c0 - vi).into(), m.into()));
        } else if (s - best).abs() <= 1e-12 && exact.is_none() {
            exact = log_p_power(p, i).map(|m| Q::new((c0 - vi).into(), m.into()));
        }
    }
    OrdEstimate { value: best, exact, kmax }
}

impl RobbaElement {
    /// `max_j (j + ŝ(P_j))` over the t-grades, with `ŝ` the coefficient
    /// growth estimate. Zero gives `-∞`.
    pub fn ord_estimate(&self) -> Result<OrdEstimate> {
        let kmax = self.profile.kmax;
        let mut out = OrdEstimate::neg_infinity(kmax);
        for j in 0..self.grades().len() {
            if self.grades()[j].is_zero() {
                continue;
            }
            let l = self.laurent(j)?;
            let est = if l.c.iter().all(|x| x.is_zero()) {
                // only content below the window; bounded there
                OrdEstimate::constant(Q::zero(), kmax)
            } else {
                ord_of_coeffs(&l, self.profile.p)
            };
            out = out.max(est.shift(j as i64));
        }
        Ok(out)
    }

    /// Estimator applied to the fully expanded coefficients (t replaced by
    /// its series).
    pub fn ord_estimate_expanded(&self) -> Result<OrdEstimate> {
        Ok(ord_of_coeffs(&self.expand()?, self.profile.p))
    }

    /// Bounded-element test: `ord ≤ 0`.
    pub fn is_bounded(&self) -> Result<bool> {
        Ok(self.ord_estimate()?.le(&Q::zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{qf, QPoly};
    use crate::robba::atoms::partial_unit;
    use crate::robba::Profile;
    use std::collections::BTreeMap;

    #[test]
    fn ord_of_t() {
        for p in [2u64, 3, 5] {
            let pr = Profile::default().with_p(p).with_window(-4, 5 * 8);
            let t = RobbaElement::t(pr);
            assert_eq!(t.ord_estimate().unwrap().exact, Some(q(1)));
            let e = t.ord_estimate_expanded().unwrap();
            assert_eq!(e.exact, Some(q(1)), "p = {p}");
        }
    }

    #[test]
    fn constants_are_order_zero() {
        let pr = Profile::default();
        for c in [q(1), qf(1, 8), q(12), qf(-3, 5)] {
            assert_eq!(RobbaElement::constant(pr, c).ord_estimate().unwrap().exact, Some(q(0)));
        }
    }

    #[test]
    fn shift_by_t_powers() {
        let pr = Profile::default();
        let t = RobbaElement::t(pr);
        let atoms = [RobbaElement::one(pr), t.clone(), t.pow(2), partial_unit(2, 2, pr).unwrap()];
        for g in atoms {
            let base = g.ord_estimate().unwrap();
            for k in 1..=3 {
                let shifted = g.mul_t_pow(k).ord_estimate().unwrap();
                assert!((shifted.value - base.value - k as f64).abs() < 1e-9);
            }
            let scaled = g.scale(&qf(3, 5)).ord_estimate().unwrap();
            assert_eq!(scaled, base);
        }
    }

    #[test]
    fn bounded_series_accepted() {
        let pr = Profile::default();
        let geo: BTreeMap<i64, Q> = (0..=pr.kmax).map(|k| (k, q(1))).collect();
        assert!(RobbaElement::from_laurent(pr, &geo, None).is_bounded().unwrap());
        let neg: BTreeMap<i64, Q> = (pr.kmin..0).map(|k| (k, crate::arith::ppow(2, -k))).collect();
        assert!(RobbaElement::from_laurent(pr, &neg, None).is_bounded().unwrap());
        let inv = RobbaElement::from_parts(pr, vec![QPoly::one()], QPoly::from_ints(&[1, 1]), None);
        assert!(inv.is_bounded().unwrap());
        assert!(!RobbaElement::t(pr).is_bounded().unwrap());
    }

    #[test]
    fn monotone_in_window() {
        let mut prev = f64::NEG_INFINITY;
        for kmax in [16, 32, 48, 64] {
            let pr = Profile::default().with_window(-8, kmax);
            let t = RobbaElement::t(pr);
            let v = t.ord_estimate_expanded().unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
    }
}
