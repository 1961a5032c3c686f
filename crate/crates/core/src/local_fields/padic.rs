//! Elements of Q_p at finite absolute precision.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{vp, Q};
use crate::error::{Error, Result};

/// `p^val * unit`, known modulo `p^prec`.
///
/// A value with `val == None` is zero at the stated precision.
#[derive(Clone, PartialEq, Eq)]
pub struct PAdicScalar {
    pub p: u64,
    pub val: Option<i64>,
    pub unit: BigInt,
    pub prec: i64,
}

impl fmt::Debug for PAdicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.val {
            None => write!(f, "O({}^{})", self.p, self.prec),
            Some(v) => write!(f, "{}^{} * {} + O({}^{})", self.p, v, self.unit, self.p, self.prec),
        }
    }
}

fn pbig(p: u64, e: i64) -> BigInt {
    num_traits::pow(BigInt::from(p), e.max(0) as usize)
}

impl PAdicScalar {
    pub fn zero(p: u64, prec: i64) -> Self {
        PAdicScalar { p, val: None, unit: BigInt::zero(), prec }
    }

    /// Truncate an exact rational to absolute precision `prec`.
    pub fn from_q(p: u64, x: &Q, prec: i64) -> Self {
        match vp(p, x) {
            None => Self::zero(p, prec),
            Some(v) if v >= prec => Self::zero(p, prec),
            Some(v) => {
                let m = pbig(p, prec - v);
                let u = x / crate::arith::ppow(p, v);
                let num = u.numer().mod_floor(&m);
                let den_inv = modinv(&u.denom().mod_floor(&m), &m);
                PAdicScalar { p, val: Some(v), unit: (num * den_inv).mod_floor(&m), prec }
            }
        }
    }

    pub fn from_int(p: u64, n: i64, prec: i64) -> Self {
        Self::from_q(p, &crate::arith::q(n), prec)
    }

    pub fn rel_prec(&self) -> i64 {
        self.val.map_or(0, |v| self.prec - v)
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }

    /// The rational representative `p^val * unit`.
    pub fn to_q(&self) -> Q {
        match self.val {
            None => Q::zero(),
            Some(v) => Q::from_integer(self.unit.clone()) * crate::arith::ppow(self.p, v),
        }
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.p, o.p, "mixed primes");
    }

    pub fn neg(&self) -> Self {
        match self.val {
            None => self.clone(),
            Some(v) => {
                let m = pbig(self.p, self.prec - v);
                PAdicScalar { unit: (-&self.unit).mod_floor(&m), ..self.clone() }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o);
        let prec = self.prec.min(o.prec);
        let s = self.to_q() + o.to_q();
        Ok(Self::from_q(self.p, &s, prec))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o);
        match (self.val, o.val) {
            (Some(a), Some(b)) => {
                let rel = self.rel_prec().min(o.rel_prec());
                if rel <= 0 {
                    return Err(Error::PrecisionExhausted("product has no significant digits".into()));
                }
                let v = a + b;
                let m = pbig(self.p, rel);
                Ok(PAdicScalar {
                    p: self.p,
                    val: Some(v),
                    unit: (&self.unit * &o.unit).mod_floor(&m),
                    prec: v + rel,
                })
            }
            (None, Some(b)) => Ok(Self::zero(self.p, self.prec + b)),
            (Some(a), None) => Ok(Self::zero(self.p, o.prec + a)),
            (None, None) => Ok(Self::zero(self.p, self.prec + o.prec)),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match self.val {
            None if self.prec == i64::MAX => Err(Error::DivisionByZero),
            None => Err(Error::PrecisionExhausted(format!(
                "inverting a value known only modulo {}^{}",
                self.p, self.prec
            ))),
            Some(v) => {
                let rel = self.rel_prec();
                let m = pbig(self.p, rel);
                Ok(PAdicScalar {
                    p: self.p,
                    val: Some(-v),
                    unit: modinv(&self.unit, &m),
                    prec: rel - v,
                })
            }
        }
    }
}

/// Inverse of `a` modulo `m` (a coprime to m).
pub fn modinv(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "not invertible modulo m");
    e.x.mod_floor(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qf};

    #[test]
    fn inverse_of_p() {
        let two = PAdicScalar::from_int(2, 2, 16);
        let i = two.inv().unwrap();
        assert_eq!(i.val, Some(-1));
        assert_eq!(i.unit, BigInt::one());
        assert_eq!(i.to_q(), qf(1, 2));
    }

    #[test]
    fn one_plus_one() {
        let one = PAdicScalar::from_int(2, 1, 16);
        let s = one.add(&one).unwrap();
        assert_eq!(s.val, Some(1));
        assert_eq!(s.to_q(), q(2));
    }

    #[test]
    fn third_times_six() {
        let a = PAdicScalar::from_q(3, &qf(1, 3), 10);
        let b = PAdicScalar::from_int(3, 6, 10);
        let c = a.mul(&b).unwrap();
        assert_eq!(c.val, Some(0));
        assert_eq!(c.to_q(), q(2));
    }

    #[test]
    fn units_and_zero() {
        let x = PAdicScalar::from_q(5, &qf(7, 3), 6);
        let y = x.inv().unwrap();
        let one = x.mul(&y).unwrap();
        assert_eq!(one.val, Some(0));
        assert_eq!(one.unit, BigInt::one());
        let z = PAdicScalar::from_int(5, 0, 6);
        assert!(matches!(z.inv(), Err(Error::PrecisionExhausted(_))));
        let exact_zero = PAdicScalar::zero(5, i64::MAX);
        assert_eq!(exact_zero.inv(), Err(Error::DivisionByZero));
        assert!(x.add(&x.neg()).unwrap().is_zero());
    }

    #[test]
    fn precision_follows_inputs() {
        let a = PAdicScalar::from_int(2, 3, 4);
        let b = PAdicScalar::from_int(2, 5, 10);
        assert_eq!(a.add(&b).unwrap().prec, 4);
        let c = PAdicScalar::from_int(2, 4, 10);
        // 4 = 2^2 with 8 relative digits, times 3 with 4 relative digits
        assert_eq!(a.mul(&c).unwrap().prec, 6);
    }
}
