//! Elements of the truncated Robba ring.
//!
//! An element is stored exactly as `Σ_j t^j N_j(X) / D(X)` with `t` kept
//! symbolic. The Laurent coefficients on the annulus are a derived view
//! (see [`RobbaElement::laurent`]) which is where windows and tails enter.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::profile::Profile;
use crate::arith::{fmt_q, newton_root_valuations, q, q_level_poly, QPoly, Q};
use crate::error::{Error, Result};

/// Bookkeeping for elements that are approximations of an infinite series.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Approx {
    /// Known only modulo `X^high` (coefficientwise).
    pub high: Option<i64>,
    /// Terms below `X^low` were dropped.
    pub low: Option<i64>,
    /// Rational constants are approximations known modulo `p^pprec`.
    pub pprec: Option<i64>,
}

impl Approx {
    pub fn merge(a: &Option<Approx>, b: &Option<Approx>) -> Option<Approx> {
        match (a, b) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (Some(x), Some(y)) => Some(Approx {
                high: min_opt(x.high, y.high),
                low: max_opt(x.low, y.low),
                pprec: min_opt(x.pprec, y.pprec),
            }),
        }
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) | (None, x) => x,
    }
}

fn max_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) | (None, x) => x,
    }
}

#[derive(Clone, PartialEq)]
pub struct RobbaElement {
    pub profile: Profile,
    /// Numerators by power of `t`.
    grades: Vec<QPoly>,
    /// Monic common denominator.
    den: QPoly,
    pub approx: Option<Approx>,
}

impl fmt::Debug for RobbaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (j, g) in self.grades.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            parts.push(match j {
                0 => format!("({g:?})"),
                1 => format!("t({g:?})"),
                _ => format!("t^{j}({g:?})"),
            });
        }
        write!(f, "[{}]", parts.join(" + "))?;
        if self.den != QPoly::one() {
            write!(f, " / ({:?})", self.den)?;
        }
        if let Some(a) = &self.approx {
            write!(f, " ~{a:?}")?;
        }
        Ok(())
    }
}

/// Laurent coefficients of one t-grade on the window `[kmin, kmax]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    pub kmin: i64,
    pub c: Vec<Q>,
    /// Nonzero content above `kmax` was cut.
    pub high_cut: bool,
    /// Nonzero content below `kmin` was cut.
    pub low_cut: bool,
}

impl Laurent {
    pub fn coeff(&self, k: i64) -> Q {
        let i = k - self.kmin;
        if i < 0 || i as usize >= self.c.len() {
            Q::zero()
        } else {
            self.c[i as usize].clone()
        }
    }

    pub fn kmax(&self) -> i64 {
        self.kmin + self.c.len() as i64 - 1
    }

    pub fn to_map(&self) -> BTreeMap<i64, Q> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (self.kmin + i as i64, x.clone()))
            .collect()
    }
}

impl RobbaElement {
    pub fn from_parts(profile: Profile, grades: Vec<QPoly>, den: QPoly, approx: Option<Approx>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut e = RobbaElement { profile, grades, den, approx };
        e.normalize();
        e
    }

    fn normalize(&mut self) {
        while self.grades.last().is_some_and(|g| g.is_zero()) {
            self.grades.pop();
        }
        if self.grades.is_empty() {
            self.den = QPoly::one();
            return;
        }
        let mut g = self.den.clone();
        for n in &self.grades {
            if g == QPoly::one() {
                break;
            }
            g = QPoly::gcd(&g, n);
        }
        if g.deg().unwrap_or(0) > 0 {
            self.den = self.den.div_exact(&g).unwrap();
            for n in self.grades.iter_mut() {
                *n = n.div_exact(&g).unwrap();
            }
        }
        let lead = self.den.leading();
        if !lead.is_one() {
            let li = lead.recip();
            self.den = self.den.scale(&li);
            for n in self.grades.iter_mut() {
                *n = n.scale(&li);
            }
        }
    }

    pub fn zero(profile: Profile) -> Self {
        Self::from_parts(profile, vec![], QPoly::one(), None)
    }

    pub fn constant(profile: Profile, c: Q) -> Self {
        Self::from_poly(profile, QPoly::constant(c))
    }

    pub fn one(profile: Profile) -> Self {
        Self::constant(profile, Q::one())
    }

    pub fn from_poly(profile: Profile, f: QPoly) -> Self {
        Self::from_parts(profile, vec![f], QPoly::one(), None)
    }

    pub fn x(profile: Profile) -> Self {
        Self::from_poly(profile, QPoly::x())
    }

    /// `c X^k`, negative `k` allowed.
    pub fn monomial(profile: Profile, c: Q, k: i64) -> Self {
        if k >= 0 {
            Self::from_poly(profile, QPoly::monomial(c, k as usize))
        } else {
            Self::from_parts(
                profile,
                vec![QPoly::constant(c)],
                QPoly::monomial(Q::one(), (-k) as usize),
                None,
            )
        }
    }

    /// The symbolic period `t = log(1+X)`.
    pub fn t(profile: Profile) -> Self {
        Self::from_parts(profile, vec![QPoly::zero(), QPoly::one()], QPoly::one(), None)
    }

    /// Element with the given Laurent coefficients.
    pub fn from_laurent(profile: Profile, coeffs: &BTreeMap<i64, Q>, approx: Option<Approx>) -> Self {
        let lo = coeffs.keys().next().copied().unwrap_or(0).min(0);
        let mut num = vec![Q::zero(); coeffs.keys().last().map_or(0, |&k| (k - lo + 1) as usize)];
        for (&k, v) in coeffs {
            num[(k - lo) as usize] = v.clone();
        }
        Self::from_parts(
            profile,
            vec![QPoly::new(num)],
            QPoly::monomial(Q::one(), (-lo) as usize),
            approx,
        )
    }

    /// `Σ_j t^j P_j` from per-grade polynomials.
    pub fn from_grades(profile: Profile, grades: Vec<QPoly>) -> Self {
        Self::from_parts(profile, grades, QPoly::one(), None)
    }

    pub fn grades(&self) -> &[QPoly] {
        &self.grades
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.grades.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.approx.is_none()
    }

    /// The element has no t-dependence.
    pub fn t_degree(&self) -> usize {
        self.grades.len().saturating_sub(1)
    }

    /// The grade-0 numerator when the element is a polynomial in X.
    pub fn as_poly(&self) -> Option<QPoly> {
        if self.grades.len() <= 1 && self.den == QPoly::one() {
            Some(self.grades.first().cloned().unwrap_or_else(QPoly::zero))
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<Q> {
        self.as_poly().and_then(|f| (f.deg().unwrap_or(0) == 0).then(|| f.coeff(0)))
    }

    /// Highest X-exponent of the Laurent polynomial part.
    pub fn x_degree(&self) -> i64 {
        let dd = self.den.deg().unwrap_or(0) as i64;
        self.grades
            .iter()
            .filter_map(|g| g.deg())
            .map(|d| d as i64 - dd)
            .max()
            .unwrap_or(i64::MIN)
    }

    fn same_profile(&self, o: &Self) -> Result<()> {
        if self.profile != o.profile {
            Err(Error::ProfileMismatch)
        } else {
            Ok(())
        }
    }

    pub fn with_approx(mut self, a: Option<Approx>) -> Self {
        self.approx = Approx::merge(&self.approx, &a);
        self
    }

    pub fn add_raw(&self, o: &Self) -> Self {
        let (den, fa, fb) = if self.den == o.den {
            (self.den.clone(), QPoly::one(), QPoly::one())
        } else {
            let g = QPoly::gcd(&self.den, &o.den);
            let fa = o.den.div_exact(&g).unwrap();
            let fb = self.den.div_exact(&g).unwrap();
            (&self.den * &fa, fa, fb)
        };
        let n = self.grades.len().max(o.grades.len());
        let zero = QPoly::zero();
        let grades = (0..n)
            .map(|j| {
                let a = self.grades.get(j).unwrap_or(&zero);
                let b = o.grades.get(j).unwrap_or(&zero);
                &(a * &fa) + &(b * &fb)
            })
            .collect();
        Self::from_parts(self.profile, grades, den, Approx::merge(&self.approx, &o.approx))
    }

    pub fn neg(&self) -> Self {
        self.scale(&q(-1))
    }

    pub fn sub_raw(&self, o: &Self) -> Self {
        self.add_raw(&o.neg())
    }

    pub fn mul_raw(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.profile).with_approx(Approx::merge(&self.approx, &o.approx));
        }
        let mut grades = vec![QPoly::zero(); self.grades.len() + o.grades.len() - 1];
        for (i, a) in self.grades.iter().enumerate() {
            for (j, b) in o.grades.iter().enumerate() {
                grades[i + j] = &grades[i + j] + &(a * b);
            }
        }
        Self::from_parts(self.profile, grades, &self.den * &o.den, Approx::merge(&self.approx, &o.approx))
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::from_parts(
            self.profile,
            self.grades.iter().map(|g| g.scale(c)).collect(),
            self.den.clone(),
            self.approx.clone(),
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.profile);
        for _ in 0..k {
            acc = acc.mul_raw(self);
        }
        acc
    }

    /// Multiply by `t^k`, `k ≥ 0`.
    pub fn mul_t_pow(&self, k: usize) -> Self {
        let mut grades = vec![QPoly::zero(); k];
        grades.extend(self.grades.iter().cloned());
        Self::from_parts(self.profile, grades, self.den.clone(), self.approx.clone())
    }

    /// Divide by `t^k` when the element is divisible by it symbolically.
    pub fn div_t_pow(&self, k: usize) -> Option<Self> {
        if self.grades.iter().take(k).any(|g| !g.is_zero()) {
            return None;
        }
        Some(Self::from_parts(
            self.profile,
            self.grades.iter().skip(k).cloned().collect(),
            self.den.clone(),
            self.approx.clone(),
        ))
    }

    pub fn check_window(self) -> Result<Self> {
        if self.x_degree() > self.profile.kmax {
            return Err(Error::WindowOverflow(format!(
                "X-degree {} exceeds kmax = {}",
                self.x_degree(),
                self.profile.kmax
            )));
        }
        Ok(self)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_profile(o)?;
        self.add_raw(o).check_window()
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_profile(o)?;
        self.sub_raw(o).check_window()
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_profile(o)?;
        self.mul_raw(o).check_window()
    }

    /// Split the denominator into the part with roots inside the open unit
    /// disc and the part with roots of absolute value at least 1.
    pub fn split_den(&self) -> Result<(QPoly, QPoly)> {
        split_inner_outer(&self.den, self.profile.p)
    }

    /// Laurent expansion of grade `j` near the boundary of the unit disc,
    /// cut to the profile window.
    pub fn laurent(&self, j: usize) -> Result<Laurent> {
        let Profile { kmin, kmax, p, .. } = self.profile;
        let num = self.grades.get(j).cloned().unwrap_or_else(QPoly::zero);
        let mut out = Laurent {
            kmin,
            c: vec![Q::zero(); (kmax - kmin + 1) as usize],
            high_cut: false,
            low_cut: false,
        };
        if num.is_zero() {
            return Ok(out);
        }
        let (din, dout) = split_inner_outer(&self.den, p)?;
        let (a, b) = if din.deg().unwrap_or(0) == 0 || dout.deg().unwrap_or(0) == 0 {
            if din.deg().unwrap_or(0) == 0 {
                (QPoly::zero(), QPoly::constant(din.coeff(0).recip()))
            } else {
                (QPoly::constant(dout.coeff(0).recip()), QPoly::zero())
            }
        } else {
            let (g, s, t) = QPoly::xgcd(&dout, &din);
            debug_assert_eq!(g, QPoly::one());
            (s, t)
        };
        // num/D = num*a/din + num*b/dout  (a*dout + b*din = 1)
        if !a.is_zero() {
            let (quo, rem) = (&num * &a).divrem(&din);
            add_poly(&mut out, &quo);
            if !rem.is_zero() {
                let dd = din.deg().unwrap();
                let dr = rem.deg().unwrap();
                // rem/din = Y^{dd-dr} rem*(Y)/din*(Y), Y = 1/X
                let rrev = reverse(&rem, dr);
                let drev = reverse(&din, dd);
                let shift = (dd - dr) as i64;
                let need = (-kmin - shift + 1).max(0) as usize;
                let (ser, more) = series_div(&rrev, &drev, need);
                for (i, c) in ser.iter().enumerate() {
                    let k = -(shift + i as i64);
                    put(&mut out, k, c);
                }
                out.low_cut |= more;
            }
        }
        if !b.is_zero() {
            let nb = &num * &b;
            if dout.deg().unwrap_or(0) == 0 {
                add_poly(&mut out, &nb.scale(&dout.coeff(0).recip()));
            } else {
                let (ser, more) = series_div(&nb, &dout, (kmax + 1) as usize);
                for (i, c) in ser.iter().enumerate() {
                    put(&mut out, i as i64, c);
                }
                out.high_cut |= more;
            }
        }
        Ok(out)
    }

    /// Laurent coefficients with `t` replaced by its logarithmic series,
    /// cut to the window.
    pub fn expand(&self) -> Result<Laurent> {
        let Profile { kmin, kmax, .. } = self.profile;
        let mut total = self.laurent(0)?;
        if self.grades.len() > 1 {
            let logs = log_series(kmax);
            let mut tpow = logs.clone();
            for j in 1..self.grades.len() {
                let lj = self.laurent(j)?;
                if lj.c.iter().any(|x| !x.is_zero()) {
                    let prod = mul_window(&lj, &tpow, kmin, kmax);
                    for k in kmin..=kmax {
                        let v = total.coeff(k) + prod.coeff(k);
                        total.c[(k - kmin) as usize] = v;
                    }
                    total.high_cut = true;
                    total.low_cut |= lj.low_cut || prod.low_cut;
                }
                tpow = mul_window(&tpow, &logs, kmin, kmax);
            }
        }
        if let Some(a) = &self.approx {
            total.high_cut |= a.high.is_some();
            total.low_cut |= a.low.is_some();
        }
        Ok(total)
    }
}

fn put(out: &mut Laurent, k: i64, c: &Q) {
    let i = k - out.kmin;
    if i < 0 {
        if !c.is_zero() {
            out.low_cut = true;
        }
    } else if i as usize >= out.c.len() {
        if !c.is_zero() {
            out.high_cut = true;
        }
    } else {
        out.c[i as usize] += c;
    }
}

fn add_poly(out: &mut Laurent, f: &QPoly) {
    for (i, c) in f.coeffs().iter().enumerate() {
        put(out, i as i64, c);
    }
}

fn reverse(f: &QPoly, d: usize) -> QPoly {
    QPoly::new((0..=d).map(|i| f.coeff(d - i)).collect())
}

/// Power series `a / b` to `n` terms (b(0) ≠ 0); the flag reports whether
/// the series continues beyond.
pub(crate) fn series_div(a: &QPoly, b: &QPoly, n: usize) -> (Vec<Q>, bool) {
    let b0inv = b.coeff(0).recip();
    let mut out: Vec<Q> = Vec::with_capacity(n);
    let bl = b.coeffs().len();
    for k in 0..n + bl {
        let mut s = a.coeff(k);
        for j in 1..bl.min(k + 1) {
            s -= &b.coeffs()[j] * &out[k - j];
        }
        out.push(s * &b0inv);
    }
    let more = out[n..].iter().any(|x| !x.is_zero()) || a.deg().is_some_and(|d| d >= n + bl);
    out.truncate(n);
    (out, more)
}

/// `Σ_{1 ≤ k ≤ kmax} (-1)^{k+1} X^k / k` on the window.
pub(crate) fn log_series(kmax: i64) -> Laurent {
    let mut c = vec![Q::zero(); (kmax + 1) as usize];
    for k in 1..=kmax {
        let s = if k % 2 == 1 { 1 } else { -1 };
        c[k as usize] = Q::new(s.into(), k.into());
    }
    Laurent { kmin: 0, c, high_cut: true, low_cut: false }
}

fn mul_window(a: &Laurent, b: &Laurent, kmin: i64, kmax: i64) -> Laurent {
    let mut c = vec![Q::zero(); (kmax - kmin + 1) as usize];
    let mut low_cut = a.low_cut || b.low_cut;
    for (i, x) in a.c.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.c.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let k = a.kmin + i as i64 + b.kmin + j as i64;
            if k > kmax {
                break;
            }
            if k < kmin {
                low_cut = true;
                continue;
            }
            c[(k - kmin) as usize] += x * y;
        }
    }
    Laurent { kmin, c, high_cut: true, low_cut }
}

/// Factor a polynomial as `inner * outer` where the roots of `inner` have
/// positive valuation and those of `outer` have valuation ≤ 0.
pub fn split_inner_outer(d: &QPoly, p: u64) -> Result<(QPoly, QPoly)> {
    let mut rest = d.monic();
    let mut inner = QPoly::one();
    if rest.deg().unwrap_or(0) == 0 {
        return Ok((inner, rest));
    }
    let classify = |f: &QPoly| -> (bool, bool) {
        let v = newton_root_valuations(f, p);
        let any_in = v.iter().any(|x| x.as_ref().is_none_or(|y| *y > Q::zero()));
        let any_out = v.iter().any(|x| x.as_ref().is_some_and(|y| *y <= Q::zero()));
        (any_in, any_out)
    };
    let (i0, o0) = classify(&rest);
    if !o0 {
        return Ok((rest, QPoly::one()));
    }
    if !i0 {
        return Ok((QPoly::one(), rest));
    }
    // peel off X, cyclotomic factors and rational roots
    let mut cands = vec![QPoly::x()];
    let deg = rest.deg().unwrap();
    let mut m = 1;
    loop {
        let f = q_level_poly(p, m);
        if f.deg().unwrap() > deg {
            break;
        }
        cands.push(f);
        m += 1;
    }
    for r in rest.rational_roots() {
        if !r.is_zero() {
            cands.push(QPoly::new(vec![-r, Q::one()]));
        }
    }
    let mut outer = QPoly::one();
    for f in cands {
        let k = rest.multiplicity(&f);
        if k == 0 {
            continue;
        }
        let fk = f.pow(k as usize);
        rest = rest.div_exact(&fk).unwrap();
        let (fi, _) = classify(&f);
        if fi {
            inner = &inner * &fk;
        } else {
            outer = &outer * &fk;
        }
    }
    let (ri, ro) = classify(&rest);
    if ri && ro {
        return Err(Error::Unsupported(format!(
            "denominator factor {rest:?} mixes roots inside and outside the unit disc"
        )));
    }
    if ri {
        inner = &inner * &rest;
    } else {
        outer = &outer * &rest;
    }
    Ok((inner, outer))
}

/// Display a Laurent map as `a_k X^k` terms.
pub fn fmt_laurent(m: &BTreeMap<i64, Q>) -> String {
    if m.is_empty() {
        return "0".into();
    }
    m.iter()
        .map(|(k, v)| match k {
            0 => fmt_q(v),
            1 => format!("{}*X", fmt_q(v)),
            _ => format!("{}*X^{}", fmt_q(v), k),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qf;

    fn pr() -> Profile {
        Profile::default()
    }

    #[test]
    fn x_times_x() {
        let x = RobbaElement::x(pr());
        assert_eq!(x.mul(&x).unwrap(), RobbaElement::monomial(pr(), q(1), 2));
    }

    #[test]
    fn negative_powers_cancel() {
        let x = RobbaElement::x(pr());
        let xi = RobbaElement::monomial(pr(), q(1), -1);
        assert_eq!(x.mul(&xi).unwrap(), RobbaElement::one(pr()));
        let l = xi.laurent(0).unwrap();
        assert_eq!(l.to_map(), BTreeMap::from([(-1, q(1))]));
    }

    #[test]
    fn inner_denominator_expands_downward() {
        // 1/(X+2) = X^{-1} - 2 X^{-2} + 4 X^{-3} - ...
        let e = RobbaElement::from_parts(pr(), vec![QPoly::one()], QPoly::from_ints(&[2, 1]), None);
        let l = e.laurent(0).unwrap();
        assert_eq!(l.coeff(-1), q(1));
        assert_eq!(l.coeff(-2), q(-2));
        assert_eq!(l.coeff(-8), q(-128));
        assert_eq!(l.coeff(0), q(0));
        assert!(l.low_cut && !l.high_cut);
    }

    #[test]
    fn outer_denominator_expands_upward() {
        let e = RobbaElement::from_parts(pr(), vec![QPoly::one()], QPoly::from_ints(&[1, 1]), None);
        let l = e.laurent(0).unwrap();
        assert_eq!(l.coeff(0), q(1));
        assert_eq!(l.coeff(5), q(-1));
        assert!(l.high_cut && !l.low_cut);
    }

    #[test]
    fn mixed_denominator_partial_fractions() {
        // 1/((X+1)(X+2)) = 1/(X+1) - 1/(X+2)
        let d = QPoly::from_ints(&[2, 3, 1]);
        let e = RobbaElement::from_parts(pr(), vec![QPoly::one()], d, None);
        let l = e.laurent(0).unwrap();
        assert_eq!(l.coeff(0), q(1));
        assert_eq!(l.coeff(3), q(-1));
        assert_eq!(l.coeff(-1), q(-1));
        assert_eq!(l.coeff(-2), q(2));
    }

    #[test]
    fn t_squared_expansion_matches_convolution() {
        let pr = Profile::default().with_t_prec(4);
        let t = RobbaElement::t(pr);
        let t2 = t.mul(&t).unwrap().expand().unwrap();
        let l = log_series(pr.kmax);
        assert_eq!(t2.coeff(0), q(0));
        assert_eq!(t2.coeff(1), q(0));
        assert_eq!(t2.coeff(2), q(1));
        for k in 2..=pr.kmax {
            let direct: Q = (1..k).map(|i| l.coeff(i) * l.coeff(k - i)).sum();
            assert_eq!(t2.coeff(k), direct);
        }
    }

    #[test]
    fn laurent_roundtrip() {
        let m = BTreeMap::from([(-2, qf(1, 3)), (0, q(5)), (3, qf(-7, 2))]);
        let e = RobbaElement::from_laurent(pr(), &m, None);
        assert_eq!(e.laurent(0).unwrap().to_map(), m);
    }

    #[test]
    fn window_overflow() {
        let x = RobbaElement::monomial(pr(), q(1), 40);
        assert!(matches!(x.mul(&x), Err(Error::WindowOverflow(_))));
    }

    #[test]
    fn profile_mismatch() {
        let a = RobbaElement::x(pr());
        let b = RobbaElement::x(pr().with_levels(2, 3));
        assert_eq!(a.add(&b), Err(Error::ProfileMismatch));
    }
}
