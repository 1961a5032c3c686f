use std::collections::BTreeSet;

use num_traits::Zero;

use super::subobjects::{enumerate_subobjects, rational_eigenbasis, SubobjectLattice};
use super::{describe_span, FilteredModule};
use crate::arith::{fmt_q, newton_root_valuations, q, vp, Q};
use crate::error::{Error, Result};
use crate::linalg::QMat;

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeStep {
    /// Basis of the step `D_k` (cumulative).
    pub basis: QMat,
    pub slope: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeReport {
    /// Weakly increasing, one entry per dimension.
    pub slopes: Vec<Q>,
    pub steps: Vec<SlopeStep>,
    /// Set when choosing among minimal (irreducible) subobjects would give a
    /// different first slope.
    pub note: Option<String>,
}

impl SlopeReport {
    pub fn sum(&self) -> Q {
        self.slopes.iter().fold(Q::zero(), |a, b| a + b)
    }

    pub fn all_zero(&self) -> bool {
        self.slopes.iter().all(|s| s.is_zero())
    }
}

fn mu(dm: &FilteredModule, big: &QMat, small: &QMat) -> Q {
    let deg = dm.degree_of(big) - dm.degree_of(small);
    deg / q((big.cols - small.cols) as i64)
}

/// Slope multiset of `M(D)` by repeatedly splitting off the largest
/// subobject of least normalized degree `(t_N - t_H)/dim`.
pub fn hn_slopes(dm: &FilteredModule) -> Result<SlopeReport> {
    let d = dm.dim();
    if d == 0 {
        return Ok(SlopeReport { slopes: vec![], steps: vec![], note: None });
    }
    match enumerate_subobjects(dm)? {
        SubobjectLattice::Scalar { lambda, .. } => {
            let v = q(vp(dm.p, &lambda).unwrap());
            let (b, h) = dm.adapted_basis();
            let mut slopes = Vec::new();
            let mut steps = Vec::new();
            let mut k = 0;
            while k < d {
                let mut e = k;
                while e < d && h[e] == h[k] {
                    e += 1;
                }
                let s = &v - q(h[k]);
                slopes.extend(std::iter::repeat(s.clone()).take(e - k));
                steps.push(SlopeStep { basis: b.select_cols(&(0..e).collect::<Vec<_>>()), slope: s });
                k = e;
            }
            Ok(SlopeReport { slopes, steps, note: None })
        }
        SubobjectLattice::Eigenlines { lines, subobjects, .. } => {
            let sets: Vec<BTreeSet<usize>> =
                subobjects.iter().map(|s| s.lines.clone().unwrap().into_iter().collect()).collect();
            let basis_of = |s: &BTreeSet<usize>| lines.select_cols(&s.iter().copied().collect::<Vec<_>>());
            let mut prev: BTreeSet<usize> = BTreeSet::new();
            let mut slopes = Vec::new();
            let mut steps = Vec::new();
            let mut first_min = None;
            while prev.len() < d {
                let pb = basis_of(&prev);
                let mut best: Option<Q> = None;
                let mut join: BTreeSet<usize> = BTreeSet::new();
                for s in sets.iter().filter(|s| s.is_superset(&prev) && s.len() > prev.len()) {
                    let m = mu(dm, &basis_of(s), &pb);
                    match &best {
                        Some(b) if &m > b => {}
                        Some(b) if &m == b => join.extend(s.iter().copied()),
                        _ => {
                            best = Some(m);
                            join = s.clone();
                        }
                    }
                }
                let best = best.expect("the whole module is a subobject");
                let jb = basis_of(&join);
                let got = mu(dm, &jb, &pb);
                if got != best {
                    return Err(Error::HNJoinFailure(format!(
                        "join {} of the minimizers has slope {} but the minimum is {}",
                        describe_span(&jb),
                        fmt_q(&got),
                        fmt_q(&best)
                    )));
                }
                if first_min.is_none() {
                    first_min = Some(best.clone());
                }
                slopes.extend(std::iter::repeat(best.clone()).take(join.len() - prev.len()));
                steps.push(SlopeStep { basis: jb, slope: best });
                prev = join;
            }
            let irreducible: Vec<&BTreeSet<usize>> = sets
                .iter()
                .filter(|s| !s.is_empty() && !sets.iter().any(|o| !o.is_empty() && o.len() < s.len() && o.is_subset(s)))
                .collect();
            let literal = irreducible.iter().map(|s| mu(dm, &basis_of(s), &basis_of(&BTreeSet::new()))).min();
            let note = match (literal, first_min) {
                (Some(l), Some(f)) if l != f => Some(format!(
                    "minimal nonzero subobjects have least slope {}, but the least slope over all subobjects is {}",
                    fmt_q(&l),
                    fmt_q(&f)
                )),
                _ => None,
            };
            Ok(SlopeReport { slopes, steps, note })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonSlopes {
    pub slopes: Vec<Q>,
    /// Basis in which φ is block diagonal by slope, when it exists over Q.
    pub basis: Option<QMat>,
}

/// Valuations of the eigenvalues of `phi`, from the Newton polygon of its
/// characteristic polynomial.
pub fn newton_slopes(phi: &QMat, p: u64) -> Result<NewtonSlopes> {
    if phi.rows == 0 {
        return Ok(NewtonSlopes { slopes: vec![], basis: Some(QMat::zeros(0, 0)) });
    }
    if phi.det().is_zero() {
        return Err(Error::NotInvertible("phi".into()));
    }
    let mut slopes: Vec<Q> = newton_root_valuations(&phi.char_poly(), p).into_iter().flatten().collect();
    slopes.sort();
    let d = phi.rows;
    let basis = if *phi == QMat::identity(d).scale(phi.get(0, 0)) {
        Some(QMat::identity(d))
    } else if let Ok((ev, b)) = rational_eigenbasis(phi) {
        let mut idx: Vec<usize> = (0..d).collect();
        idx.sort_by_key(|&i| q(vp(p, &ev[i]).unwrap()));
        Some(b.select_cols(&idx))
    } else {
        None
    };
    Ok(NewtonSlopes { slopes, basis })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_slopes() {
        let r1 = hn_slopes(&FilteredModule::example(1, 2).unwrap()).unwrap();
        assert_eq!(r1.slopes, vec![q(0), q(0)]);
        let r2 = hn_slopes(&FilteredModule::example(2, 2).unwrap()).unwrap();
        assert_eq!(r2.slopes, vec![q(-1), q(1)]);
        assert_eq!(r2.steps[0].basis.col(0), vec![q(1), q(0)]);
        let r3 = hn_slopes(&FilteredModule::example(3, 2).unwrap()).unwrap();
        assert_eq!(r3.slopes, vec![q(0), q(0)]);
        assert!(r3.note.is_some());
        assert!(r1.note.is_none());
    }

    #[test]
    fn newton_examples() {
        let p = 3;
        let pq = q(p as i64);
        let a = QMat::from_rows(vec![vec![q(1), q(0)], vec![q(0), pq.clone()]]);
        assert_eq!(newton_slopes(&a, p).unwrap().slopes, vec![q(0), q(1)]);
        let b = QMat::from_rows(vec![vec![q(0), q(1)], vec![&pq * &pq, q(0)]]);
        assert_eq!(newton_slopes(&b, p).unwrap().slopes, vec![q(1), q(1)]);
        let c = QMat::identity(2).scale(&pq);
        let ns = newton_slopes(&c, p).unwrap();
        assert_eq!(ns.slopes, vec![q(1), q(1)]);
        assert_eq!(ns.basis, Some(QMat::identity(2)));
    }

    #[test]
    fn newton_irrational_eigenvalues() {
        let phi = QMat::from_rows(vec![vec![q(0), q(2)], vec![q(1), q(0)]]);
        let ns = newton_slopes(&phi, 2).unwrap();
        assert_eq!(ns.slopes, vec![crate::arith::qf(1, 2), crate::arith::qf(1, 2)]);
        assert!(ns.basis.is_none());
    }

    #[test]
    fn scalar_slopes() {
        let phi = QMat::identity(2).scale(&q(4));
        let fil = vec![(0, QMat::identity(2)), (1, QMat::from_rows(vec![vec![q(1)], vec![q(0)]]))];
        let d = FilteredModule::new(2, phi, QMat::zeros(2, 2), fil).unwrap();
        let r = hn_slopes(&d).unwrap();
        assert_eq!(r.slopes, vec![q(1), q(2)]);
        assert_eq!(r.sum(), d.t_n() - q(d.t_h()));
    }
}
