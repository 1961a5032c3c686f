//! Exact rational numbers and dense univariate polynomials over Q.
//!
//! Everything in the crate is computed over Q, which is dense in Q_p; p-adic
//! information is read off with [`vp`] rather than stored in truncated form.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Integer power of a rational, negative exponents allowed.
pub fn qpow(base: &Q, e: i64) -> Q {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

pub fn ppow(p: u64, e: i64) -> Q {
    qpow(&q(p as i64), e)
}

fn vp_int(p: u64, n: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (quo, rem) = n.div_rem(&pb);
        if !rem.is_zero() {
            return v;
        }
        n = quo;
        v += 1;
    }
}

/// p-adic valuation; `None` for zero.
pub fn vp(p: u64, x: &Q) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(vp_int(p, x.numer()) - vp_int(p, x.denom()))
    }
}

/// Unit part `x / p^vp(x)`.
pub fn unit_part(p: u64, x: &Q) -> Q {
    match vp(p, x) {
        None => Q::zero(),
        Some(v) => x * ppow(p, -v),
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial_q(a: &Q, k: u64) -> Q {
    let mut num = Q::one();
    for j in 0..k {
        num *= a - q(j as i64);
    }
    num / Q::from_integer(factorial(k))
}

/// Parse `"a"`, `"-a/b"` and friends. Whitespace is ignored.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Q::from_integer(n))
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Dense polynomial with rational coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    c: Vec<Q>,
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", fmt_q(c))?,
                1 => write!(f, "({})X", fmt_q(c))?,
                _ => write!(f, "({})X^{}", fmt_q(c), i)?,
            }
        }
        Ok(())
    }
}

impl QPoly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        QPoly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn zero() -> Self {
        QPoly { c: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(a: Q) -> Self {
        Self::new(vec![a])
    }

    /// The monomial `a X^k`.
    pub fn monomial(a: Q, k: usize) -> Self {
        let mut c = vec![Q::zero(); k + 1];
        c[k] = a;
        Self::new(c)
    }

    pub fn x() -> Self {
        Self::monomial(Q::one(), 1)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.c.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn leading(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, a: &Q) -> Self {
        Self::new(self.c.iter().map(|x| x * a).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading().recip())
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.c.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    /// `self(g)`.
    pub fn compose(&self, g: &QPoly) -> QPoly {
        self.c
            .iter()
            .rev()
            .fold(QPoly::zero(), |acc, c| &(&acc * g) + &QPoly::constant(c.clone()))
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q(i as i64))
                .collect(),
        )
    }

    pub fn pow(&self, e: usize) -> QPoly {
        let mut acc = QPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.deg().expect("division by zero polynomial");
        let lead_inv = d.leading().recip();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let mut quo = vec![Q::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let f = &r[i] * &lead_inv;
            for (j, dc) in d.c.iter().enumerate() {
                let idx = i - dd + j;
                r[idx] = &r[idx] - &f * dc;
            }
            quo[i - dd] = f;
        }
        r.truncate(dd);
        (QPoly::new(quo), QPoly::new(r))
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.divrem(d).1
    }

    /// Exact quotient, `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &QPoly) -> Option<QPoly> {
        let (qq, r) = self.divrem(d);
        r.is_zero().then_some(qq)
    }

    /// Monic gcd.
    pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s a + t b = g`, `g` monic (or zero).
    pub fn xgcd(a: &QPoly, b: &QPoly) -> (QPoly, QPoly, QPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (QPoly::one(), QPoly::zero());
        let (mut t0, mut t1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (qq, r) = r0.divrem(&r1);
            let s = &s0 - &(&qq * &s1);
            let t = &t0 - &(&qq * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let li = r0.leading().recip();
        (r0.scale(&li), s0.scale(&li), t0.scale(&li))
    }

    /// Multiplicity of `f` as a factor of `self` (self nonzero, f nonconstant).
    pub fn multiplicity(&self, f: &QPoly) -> u32 {
        assert!(!self.is_zero());
        let mut cur = self.clone();
        let mut m = 0;
        while let Some(next) = cur.div_exact(f) {
            cur = next;
            m += 1;
        }
        m
    }

    /// Minimum p-adic valuation of the coefficients (Gauss valuation).
    pub fn gauss_valuation(&self, p: u64) -> Option<i64> {
        self.c.iter().filter_map(|c| vp(p, c)).min()
    }

    /// Multiply by a common integer so that all coefficients are integers and
    /// return `(scaled, factor)`.
    pub fn clear_denominators(&self) -> (QPoly, BigInt) {
        let l = self
            .c
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        (self.scale(&Q::from_integer(l.clone())), l)
    }

    /// Rational roots, each listed once.
    pub fn rational_roots(&self) -> Vec<Q> {
        if self.is_zero() {
            return vec![];
        }
        let mut roots = Vec::new();
        let mut f = self.clone();
        // strip X factors
        while f.coeff(0).is_zero() && f.deg().unwrap_or(0) > 0 {
            if !roots.contains(&Q::zero()) {
                roots.push(Q::zero());
            }
            f = f.div_exact(&QPoly::x()).unwrap();
        }
        if f.deg().unwrap_or(0) == 0 {
            return roots;
        }
        let (fi, _) = f.clear_denominators();
        let a0 = fi.coeff(0).numer().abs();
        let an = fi.leading().numer().abs();
        let dn = divisors(&a0);
        let dd = divisors(&an);
        for num in &dn {
            for den in &dd {
                for sign in [1i64, -1] {
                    let cand = Q::new(num * BigInt::from(sign), den.clone());
                    if !roots.contains(&cand) && f.eval(&cand).is_zero() {
                        roots.push(cand);
                    }
                }
            }
        }
        roots
    }

    pub fn max_abs_coeff_bits(&self) -> u64 {
        self.c
            .iter()
            .map(|c| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

/// Valuations of the roots of `f` (with multiplicity) read off the lower
/// convex hull of the points `(i, v_p(c_i))`. Roots at 0 are reported as `None`.
pub fn newton_root_valuations(f: &QPoly, p: u64) -> Vec<Option<Q>> {
    let pts: Vec<(i64, i64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| vp(p, c).map(|v| (i as i64, v)))
        .collect();
    let mut out = Vec::new();
    let Some(&(i0, _)) = pts.first() else {
        return out;
    };
    out.extend((0..i0).map(|_| None));
    // lower hull by gift wrapping from the left
    let mut cur = 0;
    while cur + 1 < pts.len() {
        let (x0, y0) = pts[cur];
        let mut best = cur + 1;
        for k in cur + 1..pts.len() {
            let (xb, yb) = pts[best];
            let (xk, yk) = pts[k];
            // slope k <= slope best, prefer farther point on ties
            let lhs = (yk - y0) * (xb - x0);
            let rhs = (yb - y0) * (xk - x0);
            if lhs < rhs || (lhs == rhs && xk > xb) {
                best = k;
            }
        }
        let (x1, y1) = pts[best];
        let slope = Q::new(BigInt::from(y1 - y0), BigInt::from(x1 - x0));
        for _ in 0..(x1 - x0) {
            out.push(Some(-slope.clone()));
        }
        cur = best;
    }
    out
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    // trial division; inputs are small in practice (products of p-powers and
    // small integers)
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.clone();
    let mut d = BigInt::from(2);
    while &d * &d <= m {
        let mut e = 0;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += 1;
    }
    if m > BigInt::one() {
        factors.push((m, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (f, e) in factors {
        let mut next = Vec::new();
        for d in &divs {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pw);
                pw *= &f;
            }
        }
        divs = next;
    }
    divs
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &QPoly {
    type Output = QPoly;
    fn sub(self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly::new(self.c.iter().map(|x| -x).collect())
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        QPoly::new(c)
    }
}

/// `(1 + X)^n - 1`.
pub fn one_plus_x_pow_minus_one(n: u64) -> QPoly {
    let mut c = Vec::with_capacity(n as usize + 1);
    let mut b = BigInt::one();
    c.push(Q::zero());
    for k in 1..=n {
        b = b * BigInt::from(n - k + 1) / BigInt::from(k);
        c.push(Q::from_integer(b.clone()));
    }
    QPoly::new(c)
}

/// `φ^{n-1}(q) = ((1+X)^{p^n} - 1) / ((1+X)^{p^{n-1}} - 1)`, the minimal
/// polynomial of `ζ_{p^n} - 1`.
pub fn q_level_poly(p: u64, n: u32) -> QPoly {
    assert!(n >= 1);
    let num = one_plus_x_pow_minus_one(p.pow(n));
    let den = one_plus_x_pow_minus_one(p.pow(n - 1));
    num.div_exact(&den).expect("cyclotomic quotient is exact")
}

/// `(1 + X)^n - 1` modulo `X^keep`.
pub fn one_plus_x_pow_minus_one_mod(n: u64, keep: usize) -> QPoly {
    let top = (n as usize).min(keep.saturating_sub(1));
    let mut c = Vec::with_capacity(top + 1);
    let mut b = BigInt::one();
    c.push(Q::zero());
    for k in 1..=top as u64 {
        b = b * BigInt::from(n - k + 1) / BigInt::from(k);
        c.push(Q::from_integer(b.clone()));
    }
    QPoly::new(c)
}

/// `φ^{n-1}(q)` modulo `X^keep`, without forming the full polynomial.
pub fn q_level_poly_mod(p: u64, n: u32, keep: usize) -> QPoly {
    assert!(n >= 1);
    let cut = |f: QPoly| QPoly::new(f.coeffs().iter().take(keep).cloned().collect());
    let y = one_plus_x_pow_minus_one_mod(p.pow(n - 1), keep);
    // q(Y) = Σ_{j=1}^{p} C(p, j) Y^{j-1}
    let q1 = one_plus_x_pow_minus_one(p);
    let mut acc = QPoly::zero();
    for j in (1..=p as usize).rev() {
        acc = cut(&(&acc * &y) + &QPoly::constant(q1.coeff(j)));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_q_levels() {
        for p in [2u64, 3] {
            for n in 1..=4 {
                let full = q_level_poly(p, n);
                let cut = QPoly::new(full.coeffs().iter().take(10).cloned().collect());
                assert_eq!(q_level_poly_mod(p, n, 10), cut);
            }
        }
    }

    #[test]
    fn valuations() {
        assert_eq!(vp(2, &q(12)), Some(2));
        assert_eq!(vp(3, &qf(1, 18)), Some(-2));
        assert_eq!(vp(5, &q(0)), None);
        assert_eq!(unit_part(2, &qf(12, 5)), qf(3, 5));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q(" -3/6 "), Some(qf(-1, 2)));
        assert_eq!(parse_q("7"), Some(q(7)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(fmt_q(&qf(4, 2)), "2");
        assert_eq!(fmt_q(&qf(-1, 4)), "-1/4");
    }

    #[test]
    fn q_levels_p2() {
        assert_eq!(q_level_poly(2, 1), QPoly::from_ints(&[2, 1]));
        assert_eq!(q_level_poly(2, 2), QPoly::from_ints(&[2, 2, 1]));
        assert_eq!(q_level_poly(3, 1), QPoly::from_ints(&[3, 3, 1]));
        assert_eq!(q_level_poly(2, 3).deg(), Some(4));
    }

    #[test]
    fn xgcd_identity() {
        let a = q_level_poly(2, 1);
        let b = q_level_poly(2, 2);
        let (g, s, t) = QPoly::xgcd(&a, &b);
        assert_eq!(g, QPoly::one());
        assert_eq!(&(&s * &a) + &(&t * &b), QPoly::one());
    }

    #[test]
    fn roots_and_multiplicity() {
        let f = QPoly::from_ints(&[-4, 0, 1]); // X^2 - 4
        let mut r = f.rational_roots();
        r.sort();
        assert_eq!(r, vec![q(-2), q(2)]);
        let g = &f.pow(3) * &QPoly::x();
        assert_eq!(g.multiplicity(&QPoly::from_ints(&[-2, 1])), 3);
    }

    #[test]
    fn newton_polygon() {
        // X^2 - 4 at p = 2: both roots of valuation 1
        let v = newton_root_valuations(&QPoly::from_ints(&[-4, 0, 1]), 2);
        assert_eq!(v, vec![Some(q(1)), Some(q(1))]);
        // X (X + 2) (X + 1) at p = 2
        let f = &(&QPoly::x() * &QPoly::from_ints(&[2, 1])) * &QPoly::from_ints(&[1, 1]);
        let mut v = newton_root_valuations(&f, 2);
        v.sort();
        assert_eq!(v, vec![None, Some(q(0)), Some(q(1))]);
        // Y^2 + 2Y + 2: two roots of valuation 1/2
        let v = newton_root_valuations(&QPoly::from_ints(&[2, 2, 1]), 2);
        assert_eq!(v, vec![Some(qf(1, 2)), Some(qf(1, 2))]);
    }

    #[test]
    fn compose_matches_eval() {
        let f = QPoly::from_ints(&[1, -2, 3]);
        let g = QPoly::from_ints(&[0, 2, 1]);
        let x = qf(3, 7);
        assert_eq!(f.compose(&g).eval(&x), f.eval(&g.eval(&x)));
    }
}
