//! Filtered (φ,N)-modules over Q_p with rational structure matrices.

mod slopes;
mod subobjects;

use std::fmt;

use num_traits::{One, Zero};

use crate::arith::{fmt_q, q, vp, Q};
use crate::error::{Error, Result};
use crate::linalg::QMat;

pub use slopes::{hn_slopes, newton_slopes, NewtonSlopes, SlopeReport, SlopeStep};
pub use subobjects::{enumerate_subobjects, is_admissible, Admissibility, SubobjectLattice};

/// `D` with basis `e_1..e_d`. Column `j` of `phi` holds the coordinates of `φ(e_j)`.
#[derive(Clone, PartialEq)]
pub struct FilteredModule {
    pub p: u64,
    pub phi: QMat,
    pub nmat: QMat,
    /// `(i, generators of Fil^i)` with strictly increasing `i`.
    pub filtration: Vec<(i64, QMat)>,
}

impl fmt::Debug for FilteredModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FilteredModule(p = {}, d = {})", self.p, self.dim())?;
        writeln!(f, "  phi = {:?}", self.phi.to_strings())?;
        writeln!(f, "  N   = {:?}", self.nmat.to_strings())?;
        for (i, g) in &self.filtration {
            writeln!(f, "  Fil^{i} = span {:?}", g.to_strings())?;
        }
        Ok(())
    }
}

/// A φ- and N-stable subspace, given by a basis in its columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Subobject {
    pub basis: QMat,
    /// Indices of the eigenlines it is spanned by, when enumerated that way.
    pub lines: Option<Vec<usize>>,
}

impl Subobject {
    pub fn dim(&self) -> usize {
        self.basis.cols
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub what: String,
    pub witness: String,
}

fn unit_col(d: usize, i: usize) -> QMat {
    QMat::from_fn(d, 1, |r, _| if r == i { Q::one() } else { Q::zero() })
}

fn fmt_cols(m: &QMat) -> String {
    let cols: Vec<String> = (0..m.cols)
        .map(|j| format!("({})", m.col(j).iter().map(fmt_q).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("span{{{}}}", cols.join(", "))
}

impl FilteredModule {
    pub fn new(p: u64, phi: QMat, nmat: QMat, filtration: Vec<(i64, QMat)>) -> Result<Self> {
        let m = FilteredModule { p, phi, nmat, filtration };
        let v = m.validate();
        if v.is_empty() {
            Ok(m)
        } else {
            Err(Error::Validation(
                v.iter().map(|x| format!("{} ({})", x.what, x.witness)).collect::<Vec<_>>().join("; "),
            ))
        }
    }

    pub fn dim(&self) -> usize {
        self.phi.rows
    }

    pub fn zero_dim(p: u64) -> Self {
        FilteredModule { p, phi: QMat::zeros(0, 0), nmat: QMat::zeros(0, 0), filtration: vec![] }
    }

    /// Check every axiom; the result lists violations with witnesses.
    pub fn validate(&self) -> Vec<Violation> {
        let d = self.dim();
        let mut out = Vec::new();
        let mut push = |what: &str, witness: String| out.push(Violation { what: what.into(), witness });
        if !crate::robba::profile::is_prime(self.p) {
            push("p is not prime", format!("p = {}", self.p));
        }
        if self.phi.cols != d || self.nmat.rows != d || self.nmat.cols != d {
            push("matrix shapes disagree", format!("phi {}x{}, N {}x{}", d, self.phi.cols, self.nmat.rows, self.nmat.cols));
            return out;
        }
        if d > 0 && self.phi.det().is_zero() {
            push("phi is not invertible", "det phi = 0".into());
        }
        if d > 0 && !self.nmat.pow(d as i64).is_zero() {
            push("N is not nilpotent", format!("N^{d} != 0"));
        }
        let lhs = self.nmat.mul(&self.phi);
        let rhs = self.phi.mul(&self.nmat).scale(&q(self.p as i64));
        if let Some(j) = (0..d).find(|&j| lhs.col(j) != rhs.col(j)) {
            push("N phi != p phi N", format!("column e_{}", j + 1));
        }
        let mut prev: Option<&(i64, QMat)> = None;
        for entry in &self.filtration {
            let (i, g) = entry;
            if g.rows != d {
                push("filtration generators have the wrong length", format!("Fil^{i}"));
                continue;
            }
            if let Some((pi, pg)) = prev {
                if pi >= i {
                    push("jumps are not strictly increasing", format!("{pi} then {i}"));
                }
                if !pg.contains_cols(g) {
                    push("filtration is not decreasing", format!("Fil^{i} not inside Fil^{pi}"));
                }
            }
            prev = Some(entry);
        }
        out
    }

    fn least_jump(&self) -> Option<i64> {
        self.filtration.first().map(|(i, _)| *i)
    }

    /// Basis of `Fil^i D`.
    pub fn fil(&self, i: i64) -> QMat {
        let d = self.dim();
        match self.least_jump() {
            None => QMat::identity(d),
            Some(l) if i < l => QMat::identity(d),
            Some(_) => match self.filtration.iter().find(|(j, _)| *j >= i) {
                Some((_, g)) => g.column_basis_or_empty(),
                None => QMat::zeros(d, 0),
            },
        }
    }

    /// Indices where `Fil^i != Fil^{i+1}` can happen.
    fn breakpoints(&self) -> Vec<i64> {
        match self.least_jump() {
            None => vec![0],
            Some(l) => std::iter::once(l - 1).chain(self.filtration.iter().map(|(i, _)| *i)).collect(),
        }
    }

    /// Hodge–Tate weights with multiplicity: `i` repeated `dim gr^i` times,
    /// in decreasing order.
    pub fn hodge_weights(&self) -> Vec<i64> {
        let mut out = Vec::new();
        for i in self.breakpoints().into_iter().rev() {
            let g = self.fil(i).rank_or_zero() - self.fil(i + 1).rank_or_zero();
            out.extend(std::iter::repeat(i).take(g));
        }
        out
    }

    /// Basis `e'_1..e'_d` adapted to the filtration together with the weight
    /// of each vector, so that `Fil^i = span{e'_j : h_j ≥ i}`. Weights decrease.
    pub fn adapted_basis(&self) -> (QMat, Vec<i64>) {
        let d = self.dim();
        let mut b = QMat::zeros(d, 0);
        let mut h = Vec::new();
        for i in self.breakpoints().into_iter().rev() {
            let f = self.fil(i);
            for j in 0..f.cols {
                let cand = b.hcat(&f.select_cols(&[j]));
                if cand.rank_or_zero() > b.cols {
                    b = cand;
                    h.push(i);
                }
            }
        }
        (b, h)
    }

    /// `t_N = v_p(det φ)`.
    pub fn t_n(&self) -> Q {
        if self.dim() == 0 {
            return Q::zero();
        }
        q(vp(self.p, &self.phi.det()).expect("phi invertible"))
    }

    /// `t_H = Σ i dim gr^i`.
    pub fn t_h(&self) -> i64 {
        self.hodge_weights().iter().sum()
    }

    pub fn tn_th(&self) -> (Q, i64) {
        (self.t_n(), self.t_h())
    }

    /// `t_H` of the subspace spanned by `basis` with the induced filtration.
    pub fn t_h_of(&self, basis: &QMat) -> i64 {
        let k = basis.rank_or_zero() as i64;
        if k == 0 {
            return 0;
        }
        let Some(l) = self.least_jump() else { return 0 };
        let mut total = (l - 1) * k;
        let mut prev = l - 1;
        for (i, g) in &self.filtration {
            let dim = basis.intersect_cols(g).rank_or_zero() as i64;
            total += (i - prev) * dim;
            prev = *i;
        }
        total
    }

    /// `t_N` of a φ-stable subspace.
    pub fn t_n_of(&self, basis: &QMat) -> Q {
        if basis.cols == 0 {
            return Q::zero();
        }
        let a = basis.solve(&self.phi.mul(basis)).expect("phi-stable subspace");
        q(vp(self.p, &a.det()).expect("phi invertible"))
    }

    /// `t_N - t_H` of a subobject.
    pub fn degree_of(&self, basis: &QMat) -> Q {
        self.t_n_of(basis) - q(self.t_h_of(basis))
    }

    pub fn is_stable(&self, basis: &QMat) -> bool {
        basis.cols == 0 || (basis.contains_cols(&self.phi.mul(basis)) && basis.contains_cols(&self.nmat.mul(basis)))
    }

    /// The subobject `D'` with its own basis (the columns of `basis`).
    pub fn restrict(&self, basis: &QMat) -> Result<FilteredModule> {
        if !self.is_stable(basis) {
            return Err(Error::Validation(format!("{} is not phi- and N-stable", fmt_cols(basis))));
        }
        let b = basis.column_basis_or_empty();
        let k = b.cols;
        if k == 0 {
            return Ok(Self::zero_dim(self.p));
        }
        let phi = b.solve(&self.phi.mul(&b)).unwrap();
        let nmat = b.solve(&self.nmat.mul(&b)).unwrap();
        let mut filtration = Vec::new();
        for (i, g) in &self.filtration {
            let inter = b.intersect_cols(g);
            let coords = if inter.cols == 0 { QMat::zeros(k, 0) } else { b.solve(&inter).unwrap() };
            filtration.push((*i, coords));
        }
        Ok(FilteredModule { p: self.p, phi, nmat, filtration })
    }

    /// `D/D'` in the basis given by the complement chosen by `extend_to_basis`.
    pub fn quotient(&self, basis: &QMat) -> Result<FilteredModule> {
        if !self.is_stable(basis) {
            return Err(Error::Validation(format!("{} is not phi- and N-stable", fmt_cols(basis))));
        }
        let b = basis.column_basis_or_empty();
        let k = b.cols;
        let d = self.dim();
        let full = if k == 0 { QMat::identity(d) } else { b.extend_to_basis() };
        let inv = full.inverse().unwrap();
        let r = d - k;
        let proj = |m: &QMat| inv.mul(m).submatrix(k, d, 0, m.cols);
        let comp = full.submatrix(0, d, k, d);
        let phi = proj(&self.phi.mul(&comp));
        let nmat = proj(&self.nmat.mul(&comp));
        let mut filtration = Vec::new();
        for (i, g) in &self.filtration {
            let img = if g.cols == 0 { QMat::zeros(r, 0) } else { proj(g).column_basis_or_empty() };
            filtration.push((*i, img));
        }
        Ok(FilteredModule { p: self.p, phi, nmat, filtration })
    }

    /// Same module in the basis given by the columns of `s`.
    pub fn change_basis(&self, s: &QMat) -> Result<FilteredModule> {
        let si = s.inverse().ok_or_else(|| Error::NotInvertible("change of basis".into()))?;
        Ok(FilteredModule {
            p: self.p,
            phi: si.mul(&self.phi).mul(s),
            nmat: si.mul(&self.nmat).mul(s),
            filtration: self.filtration.iter().map(|(i, g)| (*i, si.mul(g))).collect(),
        })
    }

    /// Whether both modules have the same filtration, as flags of subspaces.
    pub fn same_filtration(&self, o: &FilteredModule) -> bool {
        let mut idx: Vec<i64> = self.breakpoints();
        idx.extend(o.breakpoints());
        idx.extend(idx.clone().iter().map(|i| i + 1));
        idx.iter().all(|&i| self.fil(i).same_span(&o.fil(i)))
    }

    /// The three worked examples: `φ = diag(1,p)` with `Fil^1 = e+f`,
    /// the same `φ` with `Fil^1 = e`, and `φ(e) = p²f, φ(f) = e` with `Fil^2 = e`.
    pub fn example(k: u32, p: u64) -> Result<FilteredModule> {
        let pq = q(p as i64);
        let zero = QMat::zeros(2, 2);
        let all = QMat::identity(2);
        let (phi, fil) = match k {
            1 => (
                QMat::from_rows(vec![vec![q(1), q(0)], vec![q(0), pq.clone()]]),
                vec![(0, all), (1, QMat::from_rows(vec![vec![q(1)], vec![q(1)]]))],
            ),
            2 => (
                QMat::from_rows(vec![vec![q(1), q(0)], vec![q(0), pq.clone()]]),
                vec![(1, unit_col(2, 0))],
            ),
            3 => (
                QMat::from_rows(vec![vec![q(0), q(1)], vec![&pq * &pq, q(0)]]),
                vec![(0, all), (2, unit_col(2, 0))],
            ),
            _ => return Err(Error::Validation(format!("no example {k}"))),
        };
        FilteredModule::new(p, phi, zero, fil)
    }
}

pub(crate) fn describe_span(m: &QMat) -> String {
    fmt_cols(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> QMat {
        QMat::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    #[test]
    fn examples_validate() {
        for k in 1..=3 {
            assert!(FilteredModule::example(k, 2).unwrap().validate().is_empty());
        }
    }

    #[test]
    fn monodromy_relation() {
        let phi = m(&[&[1, 0], &[0, 2]]);
        let bad = FilteredModule { p: 2, phi: phi.clone(), nmat: m(&[&[0, 0], &[1, 0]]), filtration: vec![] };
        let v = bad.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].witness, "column e_1");
        let good = FilteredModule { p: 2, phi, nmat: m(&[&[0, 1], &[0, 0]]), filtration: vec![] };
        assert!(good.validate().is_empty());
    }

    #[test]
    fn tn_th_examples() {
        assert_eq!(FilteredModule::example(1, 2).unwrap().tn_th(), (q(1), 1));
        assert_eq!(FilteredModule::example(2, 2).unwrap().tn_th(), (q(1), 1));
        assert_eq!(FilteredModule::example(3, 2).unwrap().tn_th(), (q(2), 2));
        assert_eq!(FilteredModule::zero_dim(2).tn_th(), (q(0), 0));
    }

    #[test]
    fn induced_filtration_weights() {
        let d = FilteredModule::example(1, 3).unwrap();
        assert_eq!(d.t_h_of(&unit_col(2, 0)), 0);
        assert_eq!(d.t_h_of(&unit_col(2, 1)), 0);
        assert_eq!(d.t_h_of(&m(&[&[1], &[1]])), 1);
        let d2 = FilteredModule::example(2, 3).unwrap();
        assert_eq!(d2.t_h_of(&unit_col(2, 0)), 1);
        assert_eq!(d2.degree_of(&unit_col(2, 0)), q(-1));
    }

    #[test]
    fn adapted_basis_matches_filtration() {
        let d = FilteredModule::example(3, 2).unwrap();
        let (b, h) = d.adapted_basis();
        assert_eq!(h, vec![2, 0]);
        assert_eq!(b.col(0), vec![q(1), q(0)]);
        assert_eq!(d.hodge_weights(), vec![2, 0]);
    }

    #[test]
    fn additivity_on_examples() {
        for k in 1..=3 {
            let d = FilteredModule::example(k, 2).unwrap();
            for s in enumerate_subobjects(&d).unwrap().subobjects() {
                let sub = d.restrict(&s.basis).unwrap();
                let quo = d.quotient(&s.basis).unwrap();
                assert!(quo.validate().is_empty());
                assert_eq!(sub.t_n() + quo.t_n(), d.t_n());
                assert_eq!(sub.t_h() + quo.t_h(), d.t_h());
            }
        }
    }

    #[test]
    fn change_basis_keeps_invariants() {
        let d = FilteredModule::example(3, 2).unwrap();
        let s = m(&[&[1, 2], &[1, 3]]);
        let e = d.change_basis(&s).unwrap();
        assert_eq!(e.tn_th(), d.tn_th());
        assert!(e.validate().is_empty());
    }
}
