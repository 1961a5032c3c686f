//! Truncated Laurent series in t over K_n.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::cyclotomic::{CycElem, CycField};
use crate::arith::{q, QPoly, Q};
use crate::error::{Error, Result};
use crate::linalg::{Field, Ring};

/// t-adic valuation of a truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TVal {
    Exact(i64),
    /// All known coefficients vanish; the valuation is at least this bound.
    AtLeast(i64),
}

impl TVal {
    pub fn lower_bound(self) -> i64 {
        match self {
            TVal::Exact(v) | TVal::AtLeast(v) => v,
        }
    }

    pub fn exact(self) -> Option<i64> {
        match self {
            TVal::Exact(v) => Some(v),
            TVal::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for TVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TVal::Exact(v) => write!(f, "{v}"),
            TVal::AtLeast(v) => write!(f, ">= {v}"),
        }
    }
}

/// `Σ_{start ≤ k < trunc} c_k t^k + O(t^trunc)` with coefficients in K_n.
#[derive(Clone)]
pub struct TSeries {
    pub field: Arc<CycField>,
    start: i64,
    c: Vec<CycElem>,
    pub trunc: i64,
}

impl PartialEq for TSeries {
    fn eq(&self, o: &Self) -> bool {
        self.field.n == o.field.n && self.trunc == o.trunc && self.start == o.start && self.c == o.c
    }
}

impl fmt::Debug for TSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{:?}]t^{}", c, self.start + i as i64)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.trunc)
    }
}

impl TSeries {
    pub fn new(field: &Arc<CycField>, start: i64, mut c: Vec<CycElem>, trunc: i64) -> Self {
        let keep = (trunc - start).max(0) as usize;
        c.truncate(keep);
        let lead = c.iter().position(|x| !x.is_zero()).unwrap_or(c.len());
        let c: Vec<CycElem> = c.into_iter().skip(lead).collect();
        let mut s = TSeries { field: field.clone(), start: start + lead as i64, c, trunc };
        while s.c.last().is_some_and(|x| x.is_zero()) {
            s.c.pop();
        }
        if s.c.is_empty() {
            s.start = trunc;
        }
        s
    }

    pub fn zero(field: &Arc<CycField>, trunc: i64) -> Self {
        Self::new(field, trunc, vec![], trunc)
    }

    pub fn constant(x: CycElem, trunc: i64) -> Self {
        let f = x.field.clone();
        Self::new(&f, 0, vec![x], trunc)
    }

    pub fn from_q(field: &Arc<CycField>, x: Q, trunc: i64) -> Self {
        Self::constant(CycElem::from_q(field, x), trunc)
    }

    pub fn one(field: &Arc<CycField>, trunc: i64) -> Self {
        Self::from_q(field, Q::one(), trunc)
    }

    /// `c t^k` known modulo `t^trunc`.
    pub fn monomial(c: CycElem, k: i64, trunc: i64) -> Self {
        let f = c.field.clone();
        Self::new(&f, k, vec![c], trunc)
    }

    pub fn t(field: &Arc<CycField>, trunc: i64) -> Self {
        Self::monomial(CycElem::one(field), 1, trunc)
    }

    pub fn level(&self) -> u32 {
        self.field.n
    }

    pub fn coeff(&self, k: i64) -> CycElem {
        if k < self.start || k >= self.start + self.c.len() as i64 {
            CycElem::zero(&self.field)
        } else {
            self.c[(k - self.start) as usize].clone()
        }
    }

    /// Known exponents with nonzero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &CycElem)> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(move |(i, x)| (self.start + i as i64, x))
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn valuation(&self) -> TVal {
        if self.c.is_empty() {
            TVal::AtLeast(self.trunc)
        } else {
            TVal::Exact(self.start)
        }
    }

    /// Number of poles, `max(0, -valuation)`.
    pub fn pole_order(&self) -> i64 {
        (-self.valuation().lower_bound()).max(0)
    }

    fn vlow(&self) -> i64 {
        self.valuation().lower_bound()
    }

    pub fn with_trunc(&self, trunc: i64) -> Self {
        assert!(trunc <= self.trunc, "cannot raise truncation");
        Self::new(&self.field, self.start, self.c.clone(), trunc)
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        TSeries {
            field: self.field.clone(),
            start: self.start + k,
            c: self.c.clone(),
            trunc: self.trunc + k,
        }
    }

    /// Coefficientwise image under `K_n → K_{n+1}`.
    pub fn lift(&self, up: &Arc<CycField>) -> Self {
        let c = self.c.iter().map(|x| x.lift(up)).collect();
        Self::new(up, self.start, c, self.trunc)
    }

    pub fn scale(&self, a: &Q) -> Self {
        Self::new(&self.field, self.start, self.c.iter().map(|x| x.scale(a)).collect(), self.trunc)
    }

    pub fn scale_c(&self, a: &CycElem) -> Self {
        Self::new(&self.field, self.start, self.c.iter().map(|x| x.mul_el(a)).collect(), self.trunc)
    }

    fn combine(&self, o: &Self, sub: bool) -> Self {
        assert_eq!(self.field.n, o.field.n, "level mismatch");
        let trunc = self.trunc.min(o.trunc);
        let start = self.start.min(o.start).min(trunc);
        let stored_end = |s: &Self| if s.c.is_empty() { i64::MIN } else { s.start + s.c.len() as i64 };
        let end = stored_end(self).max(stored_end(o)).min(trunc);
        let c = (start..end.max(start))
            .map(|k| {
                let a = self.coeff(k);
                let b = o.coeff(k);
                if sub {
                    a.sub_el(&b)
                } else {
                    a.add_el(&b)
                }
            })
            .collect();
        Self::new(&self.field, start, c, trunc)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, true)
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.field.n, o.field.n, "level mismatch");
        let trunc = (self.trunc + o.vlow()).min(o.trunc + self.vlow());
        if self.is_zero() || o.is_zero() {
            return Self::zero(&self.field, trunc);
        }
        let start = self.start + o.start;
        let len = (trunc - start).max(0) as usize;
        let mut c = vec![CycElem::zero(&self.field); len];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                c[i + j] = c[i + j].add_el(&a.mul_el(b));
            }
        }
        Self::new(&self.field, start, c, trunc)
    }

    pub fn neg(&self) -> Self {
        self.scale(&q(-1))
    }

    /// Multiplicative inverse; the leading known coefficient must be nonzero.
    pub fn invert(&self) -> Result<Self> {
        let v = self
            .valuation()
            .exact()
            .ok_or_else(|| Error::NotInvertible("series vanishes to the known precision".into()))?;
        let n = (self.trunc - v) as usize;
        let u0inv = self.c[0].try_inv()?;
        let mut g: Vec<CycElem> = Vec::with_capacity(n);
        g.push(u0inv.clone());
        for k in 1..n {
            let mut s = CycElem::zero(&self.field);
            for j in 1..=k.min(self.c.len() - 1) {
                s = s.add_el(&self.c[j].mul_el(&g[k - j]));
            }
            g.push(s.mul_el(&u0inv).neg_el());
        }
        Ok(Self::new(&self.field, -v, g, self.trunc - 2 * v))
    }

    /// Formal derivative d/dt.
    pub fn derivative(&self) -> Self {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(i, x)| x.scale(&q(self.start + i as i64)))
            .collect();
        Self::new(&self.field, self.start - 1, c, self.trunc - 1)
    }

    /// `exp(u)` for `u` of positive valuation.
    pub fn exp(&self) -> Result<Self> {
        self.power_series(|k| {
            let mut f = Q::one();
            for j in 1..=k {
                f /= q(j as i64);
            }
            f
        })
    }

    /// `log(1 + u)` for `u` of positive valuation.
    pub fn log1p(&self) -> Result<Self> {
        self.power_series(|k| {
            if k == 0 {
                Q::zero()
            } else {
                let s = if k % 2 == 1 { 1 } else { -1 };
                Q::new(s.into(), (k as i64).into())
            }
        })
    }

    /// `Σ a_k u^k` for `u` of positive valuation, truncated at `self.trunc`.
    pub fn power_series(&self, a: impl Fn(u64) -> Q) -> Result<Self> {
        let v = self.vlow();
        if v < 1 {
            return Err(Error::NotInvertible("argument must have positive t-valuation".into()));
        }
        let trunc = self.trunc;
        let mut acc = Self::from_q(&self.field, a(0), trunc);
        let mut pw = Self::one(&self.field, trunc);
        let mut k = 1u64;
        while (k as i64) * v < trunc {
            pw = pw.mul(self).with_trunc_max(trunc);
            acc = acc.add(&pw.scale(&a(k)));
            k += 1;
        }
        Ok(acc)
    }

    fn with_trunc_max(&self, t: i64) -> Self {
        if self.trunc > t {
            self.with_trunc(t)
        } else {
            self.clone()
        }
    }

    /// `f(self)` by Horner's rule.
    pub fn eval_poly(&self, f: &QPoly) -> Self {
        let mut acc = Self::zero(&self.field, i64::MAX / 4);
        for c in f.coeffs().iter().rev() {
            acc = acc.mul(self).add(&Self::from_q(&self.field, c.clone(), i64::MAX / 4));
        }
        acc
    }

    /// Agreement modulo `t^k`.
    pub fn eq_mod(&self, o: &Self, k: i64) -> bool {
        assert!(k <= self.trunc && k <= o.trunc, "comparison beyond known precision");
        let lo = self.start.min(o.start);
        (lo..k).all(|i| self.coeff(i) == o.coeff(i))
    }

    /// Whether all known coefficients of index `< 0` vanish.
    pub fn is_integral(&self) -> bool {
        self.vlow() >= 0
    }

    /// Lowest p-adic valuation among coefficients of `t^k` for `k < upto`.
    pub fn min_coeff_valuation(&self, upto: i64) -> Option<Q> {
        self.terms()
            .filter(|(k, _)| *k < upto)
            .filter_map(|(_, c)| c.valuation().ok())
            .min()
    }
}

impl Ring for TSeries {
    fn zero_like(&self) -> Self {
        Self::zero(&self.field, self.trunc)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.field, self.trunc)
    }
    fn is_zero_el(&self) -> bool {
        self.is_zero()
    }
    fn add_el(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_el(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_el(&self, o: &Self) -> Self {
        self.mul(o)
    }
}

impl Field for TSeries {
    fn inv_el(&self) -> Self {
        self.invert().expect("invertible series")
    }
}

#[cfg(test)]
mod tests {
    use super::super::cyclotomic::field;
    use super::*;
    use crate::arith::qf;

    #[test]
    fn geometric_series() {
        let k = field(2, 1);
        let f = TSeries::one(&k, 6).add(&TSeries::t(&k, 6));
        let g = f.invert().unwrap();
        for i in 0..6 {
            let s = if i % 2 == 0 { 1 } else { -1 };
            assert_eq!(g.coeff(i), CycElem::from_q(&k, q(s)));
        }
        assert!(f.mul(&g).eq_mod(&TSeries::one(&k, 6), 6));
    }

    #[test]
    fn invert_t() {
        let k = field(3, 1);
        let g = TSeries::t(&k, 5).invert().unwrap();
        assert_eq!(g.valuation(), TVal::Exact(-1));
        assert_eq!(g.coeff(-1), CycElem::one(&k));
        assert_eq!(g.pole_order(), 1);
    }

    #[test]
    fn invert_pi_plus_t() {
        let k = field(2, 1);
        let f = TSeries::constant(CycElem::pi(&k), 6).add(&TSeries::t(&k, 6));
        let g = f.invert().unwrap();
        assert_eq!(g.coeff(0).as_rational(), Some(qf(-1, 2)));
        assert_eq!(g.coeff(1).as_rational(), Some(qf(-1, 4)));
        assert!(f.mul(&g).sub(&TSeries::one(&k, 6)).valuation().lower_bound() >= 6);
    }

    #[test]
    fn valuations() {
        let k = field(2, 2);
        let t = TSeries::t(&k, 5);
        let f = t.mul(&t).add(&t.mul(&t).mul(&t));
        assert_eq!(f.valuation(), TVal::Exact(2));
        assert_eq!(TSeries::zero(&k, 5).valuation(), TVal::AtLeast(5));
    }

    #[test]
    fn exp_log_inverse() {
        let k = field(2, 2);
        let u = TSeries::t(&k, 7).scale(&qf(1, 4));
        let e = u.exp().unwrap();
        let back = e.sub(&TSeries::one(&k, 7)).log1p().unwrap();
        assert!(back.eq_mod(&u, 7));
    }

    #[test]
    fn inverse_precision_law() {
        let k = field(3, 2);
        let pi = CycElem::pi(&k);
        let f = TSeries::new(&k, 2, vec![pi.clone(), CycElem::one(&k), pi], 8);
        let g = f.invert().unwrap();
        assert_eq!(g.pole_order(), 2);
        let prod = f.mul(&g);
        assert_eq!(prod.trunc, 6);
        assert!(prod.eq_mod(&TSeries::one(&k, 6), 6));
    }
}
