//! φ, γ, ∂, ∇, the localization maps ι_n, zero orders and unit inversion.

use num_traits::{One, Zero};

use super::element::{Approx, RobbaElement};
use crate::arith::{binomial_q, factorial, newton_root_valuations, one_plus_x_pow_minus_one, ppow, q, qf, QPoly, Q};
use crate::error::{Error, Result};
use crate::local_fields::{field, CycElem, TSeries, TVal};

/// `Σ f_i A^i B^{d-i}`, the numerator of `f(A/B)` over `B^d`.
fn homogenize(f: &QPoly, a: &QPoly, b: &QPoly, d: usize) -> QPoly {
    let mut acc = QPoly::zero();
    let mut apow = QPoly::one();
    let bpows: Vec<QPoly> = (0..=d).map(|k| b.pow(k)).collect();
    for (i, c) in f.coeffs().iter().enumerate() {
        if !c.is_zero() {
            acc = &acc + &(&apow * &bpows[d - i]).scale(c);
        }
        apow = &apow * a;
    }
    acc
}

/// Substitute `X ↦ A/B` and scale grade `j` by `c^j`.
fn substitute(f: &RobbaElement, a: &QPoly, b: &QPoly, c: &Q) -> RobbaElement {
    let dn = f.grades().iter().filter_map(|g| g.deg()).max().unwrap_or(0);
    let dd = f.den().deg().unwrap_or(0);
    let d = dn.max(dd);
    let mut cj = Q::one();
    let mut grades = Vec::new();
    for g in f.grades() {
        grades.push(homogenize(g, a, b, d).scale(&cj));
        cj *= c;
    }
    let den = homogenize(f.den(), a, b, d);
    RobbaElement::from_parts(f.profile, grades, den, f.approx.clone())
}

impl RobbaElement {
    pub(crate) fn frobenius_raw(&self) -> RobbaElement {
        let p = self.profile.p;
        let mut r = substitute(self, &one_plus_x_pow_minus_one(p), &QPoly::one(), &q(p as i64));
        if let Some(a) = &mut r.approx {
            a.low = a.low.map(|l| l * p as i64);
        }
        r
    }

    /// `X ↦ (1+X)^p - 1`, `t ↦ p t`.
    pub fn frobenius(&self) -> Result<RobbaElement> {
        self.frobenius_raw().check_window()
    }

    /// `X ↦ (1+X)^a - 1`, `t ↦ a t`. Integer `a` is exact; other p-adic
    /// units use the binomial series cut at the window.
    pub fn gamma_act(&self, a: &Q) -> Result<RobbaElement> {
        let p = self.profile.p;
        if crate::arith::vp(p, a) != Some(0) {
            return Err(Error::Validation(format!("gamma exponent {a} is not a p-adic unit")));
        }
        let r = if a.is_integer() {
            let n = a.to_integer();
            let k: u64 = n.magnitude().try_into().map_err(|_| Error::Unsupported("exponent too large".into()))?;
            let pw = one_plus_x_pow_minus_one(k);
            if n > 0.into() {
                substitute(self, &pw, &QPoly::one(), a)
            } else {
                // (1+X)^{-k} - 1 = -((1+X)^k - 1) / (1+X)^k
                let b = &pw + &QPoly::one();
                substitute(self, &pw.scale(&q(-1)), &b, a)
            }
        } else {
            if self.den() != &QPoly::one() {
                return Err(Error::Unsupported(
                    "non-integer gamma exponent on an element with a denominator".into(),
                ));
            }
            let kmax = self.profile.kmax;
            let s = QPoly::new(
                std::iter::once(Q::zero())
                    .chain((1..=kmax as u64).map(|k| binomial_q(a, k)))
                    .collect(),
            );
            let trunc = |f: &QPoly| QPoly::new(f.coeffs().iter().take((kmax + 1) as usize).cloned().collect());
            let mut grades = Vec::new();
            let mut aj = Q::one();
            for g in self.grades() {
                let mut acc = QPoly::zero();
                for c in g.coeffs().iter().rev() {
                    acc = trunc(&(&(&acc * &s) + &QPoly::constant(c.clone())));
                }
                grades.push(acc.scale(&aj));
                aj *= a;
            }
            RobbaElement::from_parts(self.profile, grades, QPoly::one(), self.approx.clone()).with_approx(Some(
                Approx { high: Some(kmax + 1), ..Default::default() },
            ))
        };
        r.check_window()
    }

    /// `∂ = (1+X) d/dX`, with `∂t = 1`.
    pub fn partial(&self) -> RobbaElement {
        let one_x = QPoly::from_ints(&[1, 1]);
        let d = self.den();
        let dprime = d.derivative();
        let n = self.grades().len();
        let mut grades = vec![QPoly::zero(); n];
        for (j, g) in self.grades().iter().enumerate() {
            // t^j ∂(g/D) with common denominator D^2
            let term = &(&(&g.derivative() * d) - &(g * &dprime)) * &one_x;
            grades[j] = &grades[j] + &term;
            if j > 0 {
                // j t^{j-1} g/D
                grades[j - 1] = &grades[j - 1] + &(g * d).scale(&q(j as i64));
            }
        }
        let mut r = RobbaElement::from_parts(self.profile, grades, d * d, self.approx.clone());
        if let Some(a) = &mut r.approx {
            a.high = a.high.map(|h| h - 1);
        }
        r
    }

    /// `∇ = t ∂`.
    pub fn nabla(&self) -> RobbaElement {
        self.partial().mul_t_pow(1)
    }

    /// The image `ι_n(f) ∈ K_n((t))` modulo `t^T`.
    pub fn iota(&self, n: u32) -> Result<TSeries> {
        self.profile.check_level(n)?;
        self.iota_any(n)
    }

    /// `ι_n` without the window restriction on `n`.
    pub fn iota_any(&self, n: u32) -> Result<TSeries> {
        if let Some(a) = &self.approx {
            return Err(Error::PrecisionExhausted(format!("cannot localize a truncated series ({a:?})")));
        }
        let tt = self.profile.t_prec;
        let x = iota_x(self.profile.p, n, tt);
        let k = x.field.clone();
        let tn = TSeries::t(&k, tt).scale(&ppow(self.profile.p, -(n as i64)));
        let mut acc = TSeries::zero(&k, tt);
        let mut tpow = TSeries::one(&k, tt);
        for g in self.grades() {
            if !g.is_zero() {
                acc = acc.add(&x.eval_poly(g).with_trunc(tt).mul(&tpow));
            }
            tpow = tpow.mul(&tn);
        }
        if self.den() != &QPoly::one() {
            let d = x.eval_poly(self.den()).with_trunc(tt);
            let di = d.invert()?;
            acc = acc.mul(&di);
        }
        Ok(acc)
    }

    /// t-adic valuation of `ι_n(f)`.
    pub fn zero_order(&self, n: u32) -> Result<TVal> {
        Ok(self.iota(n)?.valuation())
    }

    /// Multiplicative inverse of a unit of the window ring.
    pub fn invert_unit(&self) -> Result<RobbaElement> {
        if !self.is_exact() {
            return Err(Error::PrecisionExhausted("unit test needs an exact element".into()));
        }
        if self.is_zero() {
            return Err(Error::NotAUnit("zero".into()));
        }
        if self.grades().len() > 1 {
            return Err(Error::Unsupported("unit test for elements involving t".into()));
        }
        let pr = self.profile;
        for n in pr.levels() {
            if let TVal::Exact(v) = self.zero_order(n)? {
                if v > 0 {
                    return Err(Error::NotAUnit(format!("zero of order {v} at level {n}")));
                }
            }
        }
        let num = &self.grades()[0];
        let edge = qf(1, pr.e(pr.n0) as i64);
        for v in newton_root_valuations(num, pr.p).into_iter().flatten() {
            if v > Q::zero() && v <= edge {
                return Err(Error::NotAUnit(format!(
                    "Newton polygon segment of slope {v} meets the annulus"
                )));
            }
        }
        Ok(RobbaElement::from_parts(pr, vec![self.den().clone()], num.clone(), None))
    }
}

/// `ι_n(X) = ζ_{p^n} exp(t/p^n) - 1` modulo `t^T`.
pub fn iota_x(p: u64, n: u32, tt: i64) -> TSeries {
    let k = field(p, n);
    let zeta = CycElem::zeta(&k);
    let mut c = vec![CycElem::pi(&k)];
    for j in 1..tt.max(1) {
        let f = Q::from_integer(factorial(j as u64)).recip() * ppow(p, -(n as i64) * j);
        c.push(zeta.scale(&f));
    }
    TSeries::new(&k, 0, c, tt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robba::Profile;

    fn pr() -> Profile {
        Profile::default()
    }

    #[test]
    fn frobenius_of_x_and_t() {
        let x = RobbaElement::x(pr());
        assert_eq!(x.frobenius().unwrap().as_poly().unwrap(), QPoly::from_ints(&[0, 2, 1]));
        let t = RobbaElement::t(pr());
        assert_eq!(t.frobenius().unwrap(), t.scale(&q(2)));
        let qq = RobbaElement::from_poly(pr(), QPoly::from_ints(&[2, 1]));
        assert_eq!(qq.frobenius().unwrap().as_poly().unwrap(), QPoly::from_ints(&[2, 2, 1]));
    }

    #[test]
    fn gamma_examples() {
        let x = RobbaElement::x(pr());
        assert_eq!(x.gamma_act(&q(1)).unwrap(), x);
        assert_eq!(x.gamma_act(&q(3)).unwrap().as_poly().unwrap(), QPoly::from_ints(&[0, 3, 3, 1]));
        let t = RobbaElement::t(pr());
        assert_eq!(t.gamma_act(&q(3)).unwrap(), t.scale(&q(3)));
        assert!(x.gamma_act(&q(2)).is_err());
    }

    #[test]
    fn gamma_inverse_exponent() {
        let x = RobbaElement::x(pr());
        let y = x.gamma_act(&q(-1)).unwrap().gamma_act(&q(-1)).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn gamma_binomial_agrees_with_integer() {
        let pr = Profile::default().with_window(-8, 20);
        let f = RobbaElement::from_poly(pr, QPoly::from_ints(&[1, -2, 0, 5]));
        let exact = f.gamma_act(&q(5)).unwrap();
        let a = q(5) + qf(0, 1);
        assert!(a.is_integer());
        // 1/3 is a 2-adic unit; γ_{1/3} ∘ γ_3 = id up to the window
        let third = f.gamma_act(&q(3)).unwrap().gamma_act(&qf(1, 3)).unwrap();
        let l = third.expand().unwrap();
        let orig = f.expand().unwrap();
        for k in 0..=20 {
            assert_eq!(l.coeff(k), orig.coeff(k), "k = {k}");
        }
        assert!(exact.is_exact());
    }

    #[test]
    fn derivations() {
        let x2 = RobbaElement::monomial(pr(), q(1), 2);
        assert_eq!(x2.partial().as_poly().unwrap(), QPoly::from_ints(&[0, 2, 2]));
        let x = RobbaElement::x(pr());
        let tx = RobbaElement::from_grades(pr(), vec![QPoly::zero(), QPoly::from_ints(&[1, 1])]);
        assert_eq!(x.nabla(), tx);
        let t = RobbaElement::t(pr());
        assert_eq!(t.nabla(), t);
    }

    #[test]
    fn iota_of_x_and_t() {
        let x = RobbaElement::x(pr());
        let s = x.iota(1).unwrap();
        assert_eq!(s.coeff(0).as_rational(), Some(q(-2)));
        assert_eq!(s.coeff(1).as_rational(), Some(qf(-1, 2)));
        assert_eq!(s.coeff(2).as_rational(), Some(qf(-1, 8)));
        for n in 1..=3 {
            let it = RobbaElement::t(pr()).iota(n).unwrap();
            let k = field(2, n);
            assert_eq!(it, TSeries::t(&k, 8).scale(&ppow(2, -(n as i64))));
        }
        assert!(matches!(x.iota(4), Err(Error::LevelOutOfWindow(4, 1, 3))));
    }

    #[test]
    fn zero_orders() {
        let q2 = RobbaElement::from_poly(pr(), crate::arith::q_level_poly(2, 2));
        assert_eq!(q2.zero_order(1).unwrap(), TVal::Exact(0));
        assert_eq!(q2.zero_order(2).unwrap(), TVal::Exact(1));
        assert_eq!(RobbaElement::one(pr()).zero_order(3).unwrap(), TVal::Exact(0));
        for n in 1..=3 {
            assert_eq!(RobbaElement::t(pr()).zero_order(n).unwrap(), TVal::Exact(1));
        }
    }

    #[test]
    fn unit_inversion() {
        let x = RobbaElement::x(pr());
        assert_eq!(x.invert_unit().unwrap(), RobbaElement::monomial(pr(), q(1), -1));
        let one_x = RobbaElement::from_poly(pr(), QPoly::from_ints(&[1, 1]));
        let inv = one_x.invert_unit().unwrap();
        assert_eq!(one_x.mul(&inv).unwrap(), RobbaElement::one(pr()));
        let qq = RobbaElement::from_poly(pr().with_levels(2, 3), QPoly::from_ints(&[2, 1]));
        let qi = qq.invert_unit().unwrap();
        assert_eq!(qq.mul(&qi).unwrap(), RobbaElement::one(pr().with_levels(2, 3)));
        let l = qi.laurent(0).unwrap();
        assert_eq!((l.coeff(-1), l.coeff(-2), l.coeff(-3)), (q(1), q(-2), q(4)));
        let q1 = RobbaElement::from_poly(pr(), QPoly::from_ints(&[2, 1]));
        match q1.invert_unit() {
            Err(Error::NotAUnit(w)) => assert!(w.contains("level 1")),
            other => panic!("{other:?}"),
        }
    }
}
