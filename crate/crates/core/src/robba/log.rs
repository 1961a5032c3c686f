//! Polynomials in `ℓ_X` over the window ring, with a `t`-power denominator.

use std::fmt;

use num_traits::{One, Zero};

use super::element::{Approx, RobbaElement};
use super::ord::OrdEstimate;
use super::profile::Profile;
use super::ops::iota_x;
use crate::arith::{binomial_q, ppow, q, qf, vp, QPoly, Q};
use crate::error::{Error, Result};
use crate::local_fields::{CycElem, TSeries};

/// `t^{-m} Σ_i c_i ℓ_X^i`.
#[derive(Clone, PartialEq)]
pub struct LogRobbaElement {
    pub profile: Profile,
    m: u32,
    poly: Vec<RobbaElement>,
}

impl fmt::Debug for LogRobbaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m > 0 {
            write!(f, "t^-{} * ", self.m)?;
        }
        let parts: Vec<String> = self
            .poly
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c:?}"),
                1 => format!("{c:?} l"),
                _ => format!("{c:?} l^{i}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn trunc(f: &QPoly, n: usize) -> QPoly {
    QPoly::new(f.coeffs().iter().take(n).cloned().collect())
}

/// `log(1+u) mod Y^n` for `u` with zero constant term.
fn log1p_trunc(u: &QPoly, n: usize) -> QPoly {
    debug_assert!(u.coeff(0).is_zero());
    let mut acc = QPoly::zero();
    let mut upow = QPoly::one();
    for j in 1..n {
        upow = trunc(&(&upow * u), n);
        if upow.is_zero() {
            break;
        }
        let s = if j % 2 == 1 { qf(1, j as i64) } else { qf(-1, j as i64) };
        acc = &acc + &upow.scale(&s);
    }
    acc
}

/// Rational approximation of the Iwasawa logarithm `log_p(a)` modulo `p^prec`,
/// for `a` a p-adic unit in Q.
pub fn padic_log(p: u64, a: &Q, prec: i64) -> Result<Q> {
    if vp(p, a) != Some(0) {
        return Err(Error::Validation(format!("log of a non-unit {a}")));
    }
    let e: i32 = if p == 2 { 2 } else { (p - 1) as i32 };
    let b = num_traits::pow::pow(a.clone(), e as usize);
    let x = &b - Q::one();
    let Some(vx) = vp(p, &x) else {
        return Ok(Q::zero());
    };
    let mut acc = Q::zero();
    let mut xk = Q::one();
    let mut k: i64 = 1;
    loop {
        xk *= &x;
        // from here on every term has valuation at least k*vx - log_p(k) > prec
        if k * vx - ((k as f64).ln() / (p as f64).ln()).floor() as i64 > prec {
            break;
        }
        let s = if k % 2 == 1 { q(1) } else { q(-1) };
        acc += s * &xk / q(k);
        k += 1;
    }
    Ok(acc / q(e as i64))
}

/// `λ_φ = log(φ(X)/X^p)`, a series in `X^{-1}` cut at `X^{kmin}`.
pub fn lambda_phi(profile: Profile) -> RobbaElement {
    let p = profile.p as usize;
    let depth = (-profile.kmin).max(0) as usize;
    // φ(X)/X^p = 1 + Σ_{k=1}^{p-1} C(p,k) Y^{p-k},  Y = X^{-1}
    let mut u = vec![Q::zero(); p];
    for k in 1..p {
        u[p - k] = binomial_q(&q(p as i64), k as u64);
    }
    let ser = log1p_trunc(&QPoly::new(u), depth + 1);
    // Σ a_i Y^i = (Σ a_i X^{depth-i}) / X^depth
    let mut num = vec![Q::zero(); depth + 1];
    for (i, c) in ser.coeffs().iter().enumerate() {
        num[depth - i] = c.clone();
    }
    RobbaElement::from_parts(profile, vec![QPoly::new(num)], QPoly::monomial(Q::one(), depth), None)
        .with_approx(Some(Approx { low: Some(profile.kmin), ..Default::default() }))
}

/// `log(γ_a(X)/X)` with the constant `log(a)` approximated p-adically.
pub fn lambda_gamma(profile: Profile, a: &Q) -> Result<RobbaElement> {
    if a.is_one() {
        return Ok(RobbaElement::zero(profile));
    }
    let kmax = profile.kmax;
    let gx = RobbaElement::x(profile).gamma_act(a)?;
    let l = gx.laurent(0)?;
    let n = kmax as usize;
    // u = γ(X)/X mod X^kmax
    let u = QPoly::new((1..=kmax).map(|k| l.coeff(k)).collect());
    let u0 = u.coeff(0);
    let h = &u.scale(&u0.recip()) - &QPoly::one();
    let mut ser = log1p_trunc(&h, n);
    let la = padic_log(profile.p, &u0, profile.prec)?;
    let exact_const = la.is_zero();
    ser = &ser + &QPoly::constant(la);
    let approx = Approx {
        high: Some(kmax),
        pprec: (!exact_const).then_some(profile.prec),
        ..Default::default()
    };
    Ok(RobbaElement::from_poly(profile, ser).with_approx(Some(approx)))
}

/// `ι_n` of a log element: `Σ_i s_i L_n^i` with `L_n` a formal symbol for
/// `log(π_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogTSeries {
    pub coeffs: Vec<TSeries>,
}

impl LogTSeries {
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|s| !s.is_zero()).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|s| s.is_zero())
    }

    /// Minimum t-valuation across the `L_n`-coefficients.
    pub fn valuation_lower_bound(&self) -> i64 {
        self.coeffs.iter().map(|s| s.valuation().lower_bound()).min().unwrap_or(i64::MAX)
    }
}

/// `μ_n = log(1 + (ι_n(X) - π_n)/π_n)`, so that `ι_n(ℓ_X) = L_n + μ_n`.
pub fn mu(p: u64, n: u32, tt: i64) -> Result<TSeries> {
    let x = iota_x(p, n, tt);
    let k = x.field.clone();
    let pi = CycElem::pi(&k);
    let rest = x.sub(&TSeries::constant(pi.clone(), tt));
    rest.scale_c(&pi.try_inv()?).log1p()
}

impl LogRobbaElement {
    pub fn new(profile: Profile, m: u32, poly: Vec<RobbaElement>) -> Self {
        let mut e = LogRobbaElement { profile, m, poly };
        e.normalize();
        e
    }

    fn normalize(&mut self) {
        while self.poly.last().is_some_and(|c| c.is_zero()) {
            self.poly.pop();
        }
        while self.m > 0 && !self.poly.is_empty() && self.poly.iter().all(|c| c.div_t_pow(1).is_some()) {
            self.poly = self.poly.iter().map(|c| c.div_t_pow(1).unwrap()).collect();
            self.m -= 1;
        }
        if self.poly.is_empty() {
            self.m = 0;
        }
    }

    pub fn from_robba(x: RobbaElement) -> Self {
        Self::new(x.profile, 0, vec![x])
    }

    pub fn zero(profile: Profile) -> Self {
        Self::new(profile, 0, vec![])
    }

    pub fn one(profile: Profile) -> Self {
        Self::from_robba(RobbaElement::one(profile))
    }

    pub fn constant(profile: Profile, c: Q) -> Self {
        Self::from_robba(RobbaElement::constant(profile, c))
    }

    /// `ℓ_X`.
    pub fn ell(profile: Profile) -> Self {
        Self::new(profile, 0, vec![RobbaElement::zero(profile), RobbaElement::one(profile)])
    }

    pub fn t_denominator(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[RobbaElement] {
        &self.poly
    }

    pub fn coeff(&self, i: usize) -> RobbaElement {
        self.poly.get(i).cloned().unwrap_or_else(|| RobbaElement::zero(self.profile))
    }

    /// Degree in `ℓ_X` (0 for zero).
    pub fn log_degree(&self) -> usize {
        self.poly.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.poly.iter().all(|c| c.is_exact())
    }

    /// The underlying Robba element when there is no `ℓ_X` and no pole in `t`.
    pub fn as_robba(&self) -> Option<RobbaElement> {
        if self.m == 0 && self.poly.len() <= 1 {
            Some(self.coeff(0))
        } else {
            None
        }
    }

    /// Multiply by `t^{-k}`.
    pub fn div_t(&self, k: u32) -> Self {
        Self::new(self.profile, self.m + k, self.poly.clone())
    }

    pub fn mul_t(&self, k: u32) -> Self {
        let take = k.min(self.m);
        let poly = self.poly.iter().map(|c| c.mul_t_pow((k - take) as usize)).collect();
        Self::new(self.profile, self.m - take, poly)
    }

    fn lifted(&self, m: u32) -> Vec<RobbaElement> {
        let d = (m - self.m) as usize;
        self.poly.iter().map(|c| c.mul_t_pow(d)).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        let m = self.m.max(o.m);
        let a = self.lifted(m);
        let b = o.lifted(m);
        let n = a.len().max(b.len());
        let z = RobbaElement::zero(self.profile);
        let poly = (0..n)
            .map(|i| a.get(i).unwrap_or(&z).add_raw(b.get(i).unwrap_or(&z)))
            .collect();
        Self::new(self.profile, m, poly)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.profile, self.m, self.poly.iter().map(|c| c.neg()).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.profile, self.m, self.poly.iter().map(|x| x.scale(c)).collect())
    }

    pub fn mul_robba(&self, c: &RobbaElement) -> Self {
        Self::new(self.profile, self.m, self.poly.iter().map(|x| x.mul_raw(c)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.profile);
        }
        let mut poly = vec![RobbaElement::zero(self.profile); self.poly.len() + o.poly.len() - 1];
        for (i, a) in self.poly.iter().enumerate() {
            for (j, b) in o.poly.iter().enumerate() {
                poly[i + j] = poly[i + j].add_raw(&a.mul_raw(b));
            }
        }
        Self::new(self.profile, self.m + o.m, poly)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.profile);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitute `ℓ_X ↦ s` into the ℓ-polynomial after mapping coefficients.
    fn horner(&self, s: &Self, f: impl Fn(&RobbaElement) -> Result<RobbaElement>) -> Result<Self> {
        let mut acc = Self::zero(self.profile);
        for c in self.poly.iter().rev() {
            acc = acc.mul(s).add(&Self::from_robba(f(c)?));
        }
        Ok(acc)
    }

    /// Monodromy: the derivation with `N(ℓ_X) = -p/(p-1)`, zero on the Robba ring.
    pub fn monodromy(&self) -> Self {
        let p = self.profile.p as i64;
        let nl = qf(-p, p - 1);
        let poly = self.poly.iter().enumerate().skip(1).map(|(i, c)| c.scale(&(&nl * q(i as i64)))).collect();
        Self::new(self.profile, self.m, poly)
    }

    /// `φ(ℓ_X) = p ℓ_X + log(φ(X)/X^p)`, `φ(t) = p t`.
    pub fn frobenius(&self) -> Result<Self> {
        let pr = self.profile;
        let s = Self::new(pr, 0, vec![lambda_phi(pr), RobbaElement::constant(pr, q(pr.p as i64))]);
        let r = self.horner(&s, |c| c.frobenius())?;
        Ok(r.with_m(self.m).scale(&ppow(pr.p, -(self.m as i64))))
    }

    /// `γ(ℓ_X) = ℓ_X + log(γ(X)/X)`, `γ(t) = a t`.
    pub fn gamma_act(&self, a: &Q) -> Result<Self> {
        let pr = self.profile;
        let s = Self::new(pr, 0, vec![lambda_gamma(pr, a)?, RobbaElement::one(pr)]);
        let r = self.horner(&s, |c| c.gamma_act(a))?;
        Ok(r.with_m(self.m).scale(&crate::arith::qpow(a, -(self.m as i64))))
    }

    fn with_m(mut self, m: u32) -> Self {
        self.m += m;
        self.normalize();
        self
    }

    /// `∇ = t(1+X) d/dX`, with `∇ℓ_X = t(1+X)/X`.
    pub fn nabla(&self) -> Self {
        let pr = self.profile;
        let dl = RobbaElement::from_parts(pr, vec![QPoly::zero(), QPoly::from_ints(&[1, 1])], QPoly::x(), None);
        let mut poly = vec![RobbaElement::zero(pr); self.poly.len()];
        for (i, c) in self.poly.iter().enumerate() {
            let mut d = c.nabla();
            if self.m > 0 {
                d = d.sub_raw(&c.scale(&q(self.m as i64)));
            }
            poly[i] = poly[i].add_raw(&d);
            if i > 0 {
                poly[i - 1] = poly[i - 1].add_raw(&c.mul_raw(&dl).scale(&q(i as i64)));
            }
        }
        Self::new(pr, self.m, poly)
    }

    /// `ι_n`, with `ι_n(ℓ_X) = L_n + μ_n` and `ι_n(t^{-m}) = p^{nm} t^{-m}`.
    pub fn iota(&self, n: u32) -> Result<LogTSeries> {
        let pr = self.profile;
        pr.check_level(n)?;
        let tt = pr.t_prec;
        let mu = mu(pr.p, n, tt)?;
        let k = mu.field.clone();
        let g = self.poly.len();
        let mut out = vec![TSeries::zero(&k, tt); g.max(1)];
        let mut mupow = vec![TSeries::one(&k, tt)];
        for i in 1..g {
            mupow.push(mupow[i - 1].mul(&mu));
        }
        let tm = ppow(pr.p, (n as i64) * (self.m as i64));
        for (i, c) in self.poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = c.iota(n)?.scale(&tm).shift(-(self.m as i64));
            // (L + μ)^i = Σ_k C(i,k) μ^{i-k} L^k
            for kk in 0..=i {
                let b = binomial_q(&q(i as i64), kk as u64);
                out[kk] = out[kk].add(&s.mul(&mupow[i - kk]).scale(&b));
            }
        }
        Ok(LogTSeries { coeffs: out })
    }

    /// `sup_i (ord(c_i) + i) - m`.
    pub fn ord_estimate(&self) -> Result<OrdEstimate> {
        let mut out = OrdEstimate::neg_infinity(self.profile.kmax);
        for (i, c) in self.poly.iter().enumerate() {
            if !c.is_zero() {
                out = out.max(c.ord_estimate()?.shift(i as i64));
            }
        }
        Ok(out.shift(-(self.m as i64)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr() -> Profile {
        Profile::default()
    }

    #[test]
    fn monodromy_of_ell() {
        for p in [2u64, 3, 5] {
            let pr = Profile::default().with_p(p);
            let n = LogRobbaElement::ell(pr).monodromy();
            assert_eq!(n, LogRobbaElement::constant(pr, qf(-(p as i64), p as i64 - 1)));
        }
    }

    #[test]
    fn monodromy_commutes_with_frobenius() {
        for p in [2u64, 3] {
            let pr = Profile::default().with_p(p).with_window(-8, 40);
            let l = LogRobbaElement::ell(pr);
            let lhs = l.frobenius().unwrap().monodromy();
            let rhs = l.monodromy().frobenius().unwrap().scale(&q(p as i64));
            assert_eq!(lhs, rhs);
            let l2 = l.pow(2).div_t(1);
            let lhs = l2.frobenius().unwrap().monodromy();
            let rhs = l2.monodromy().frobenius().unwrap().scale(&q(p as i64));
            assert!(lhs.sub(&rhs).is_zero());
        }
    }

    #[test]
    fn gamma_one_is_identity() {
        let l = LogRobbaElement::ell(pr());
        assert_eq!(l.gamma_act(&q(1)).unwrap(), l);
        let f = l.pow(2).add(&LogRobbaElement::from_robba(RobbaElement::x(pr())));
        assert_eq!(f.gamma_act(&q(1)).unwrap(), f);
    }

    #[test]
    fn gamma_minus_one_has_no_constant() {
        // log(-1/(1+X)) = -log(1+X) exactly up to the window
        let lg = lambda_gamma(pr(), &q(-1)).unwrap();
        let l = lg.laurent(0).unwrap();
        assert!(l.coeff(0).is_zero());
        assert_eq!(l.coeff(1), q(-1));
        assert_eq!(l.coeff(2), qf(1, 2));
        assert!(lg.approx.as_ref().unwrap().pprec.is_none());
    }

    #[test]
    fn lambda_phi_leading_terms() {
        // p = 2: log(1 + 2/X) = 2/X - 2/X^2 + 8/(3X^3) - ...
        let l = lambda_phi(pr()).laurent(0).unwrap();
        assert_eq!(l.coeff(-1), q(2));
        assert_eq!(l.coeff(-2), q(-2));
        assert_eq!(l.coeff(-3), qf(8, 3));
        assert!(l.coeff(0).is_zero());
    }

    #[test]
    fn padic_log_basics() {
        assert_eq!(padic_log(3, &q(1), 20).unwrap(), q(0));
        assert_eq!(padic_log(2, &q(-1), 20).unwrap(), q(0));
        // log(4) for p = 3 has valuation 1
        let l4 = padic_log(3, &q(4), 30).unwrap();
        assert_eq!(vp(3, &l4), Some(1));
        // additivity modulo p^prec
        let l2 = padic_log(3, &q(2), 30).unwrap();
        let diff = &l4 - &(l2 * q(2));
        assert!(vp(3, &diff).map_or(true, |v| v >= 28));
    }

    #[test]
    fn nabla_of_ell_and_leibniz() {
        let pr = pr();
        let l = LogRobbaElement::ell(pr);
        let expect = RobbaElement::from_parts(pr, vec![QPoly::zero(), QPoly::from_ints(&[1, 1])], QPoly::x(), None);
        assert_eq!(l.nabla(), LogRobbaElement::from_robba(expect));
        let a = l.pow(2).div_t(1);
        let b = LogRobbaElement::from_robba(RobbaElement::x(pr)).add(&l);
        let lhs = a.mul(&b).nabla();
        let rhs = a.nabla().mul(&b).add(&a.mul(&b.nabla()));
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn iota_of_ell() {
        let pr = pr();
        let l = LogRobbaElement::ell(pr);
        for n in 1..=3 {
            let s = l.iota(n).unwrap();
            assert_eq!(s.coeffs.len(), 2);
            assert!(s.coeffs[1].sub(&TSeries::one(&s.coeffs[1].field, pr.t_prec)).is_zero());
            assert_eq!(s.coeffs[0], mu(2, n, pr.t_prec).unwrap());
            assert!(s.coeffs[0].valuation().lower_bound() >= 1);
        }
        let inv_t = LogRobbaElement::one(pr).div_t(1).iota(2).unwrap();
        assert_eq!(inv_t.coeffs[0].pole_order(), 1);
        assert_eq!(inv_t.coeffs[0].coeff(-1).as_rational(), Some(q(4)));
    }

    #[test]
    fn ord_of_log_elements() {
        let pr = pr();
        let l = LogRobbaElement::ell(pr);
        assert_eq!(l.ord_estimate().unwrap().exact, Some(q(1)));
        let t = LogRobbaElement::from_robba(RobbaElement::t(pr));
        assert_eq!(t.div_t(3).ord_estimate().unwrap().exact, Some(q(-2)));
        assert_eq!(l.div_t(1).ord_estimate().unwrap().exact, Some(q(0)));
    }

    #[test]
    fn t_denominator_normalizes() {
        let pr = pr();
        let t = LogRobbaElement::from_robba(RobbaElement::t(pr));
        assert_eq!(t.div_t(1), LogRobbaElement::one(pr));
        assert_eq!(t.div_t(3).t_denominator(), 2);
    }
}
