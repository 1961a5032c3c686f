use num_traits::Zero;

use super::{describe_span, FilteredModule, Subobject};
use crate::arith::{q, vp, QPoly, Q};
use crate::error::{Error, Result};
use crate::linalg::QMat;

/// The subobjects of `D` in the supported cases.
#[derive(Clone, Debug)]
pub enum SubobjectLattice {
    /// Distinct rational eigenvalues: N-stable spans of eigenline subsets.
    Eigenlines { eigenvalues: Vec<Q>, lines: QMat, subobjects: Vec<Subobject> },
    /// `φ = λ·Id`: every subspace is a subobject. `best_t_h[k]` is the largest
    /// `t_H` of a `k`-dimensional subspace, attained by `witness[k]`.
    Scalar { lambda: Q, best_t_h: Vec<i64>, witness: Vec<QMat> },
}

impl SubobjectLattice {
    /// Explicit subobjects (for the scalar case, the extremal ones per dimension).
    pub fn subobjects(&self) -> Vec<Subobject> {
        match self {
            SubobjectLattice::Eigenlines { subobjects, .. } => subobjects.clone(),
            SubobjectLattice::Scalar { witness, .. } => {
                witness.iter().map(|b| Subobject { basis: b.clone(), lines: None }).collect()
            }
        }
    }
}

fn is_scalar(m: &QMat) -> Option<Q> {
    let d = m.rows;
    if d == 0 {
        return None;
    }
    let l = m.get(0, 0).clone();
    (*m == QMat::identity(d).scale(&l)).then_some(l)
}

/// Eigenvalues and an eigenbasis when the characteristic polynomial splits
/// over Q with distinct roots.
pub(crate) fn rational_eigenbasis(phi: &QMat) -> Result<(Vec<Q>, QMat)> {
    let d = phi.rows;
    let cp = phi.char_poly();
    let sqfree = QPoly::gcd(&cp, &cp.derivative()).deg() == Some(0);
    if !sqfree {
        return Err(Error::UnsupportedShape(
            "characteristic polynomial of phi has a repeated root and phi is not scalar".into(),
        ));
    }
    let mut roots = cp.rational_roots();
    if roots.len() < d {
        return Err(Error::UnsupportedShape(format!(
            "characteristic polynomial {cp:?} does not split over Q"
        )));
    }
    roots.sort();
    let mut cols = Vec::new();
    for r in &roots {
        let a = phi.sub(&QMat::identity(d).scale(r));
        let k = a.kernel(&q(1));
        cols.push(k.col(0));
    }
    Ok((roots, QMat::from_cols(&cols, d)))
}

pub fn enumerate_subobjects(dm: &FilteredModule) -> Result<SubobjectLattice> {
    let d = dm.dim();
    if let Some(lambda) = is_scalar(&dm.phi) {
        let (b, _) = dm.adapted_basis();
        let h = dm.hodge_weights();
        let mut best = vec![0];
        let mut witness = vec![QMat::zeros(d, 0)];
        for k in 1..=d {
            best.push(h[..k].iter().sum());
            witness.push(b.select_cols(&(0..k).collect::<Vec<_>>()));
        }
        return Ok(SubobjectLattice::Scalar { lambda, best_t_h: best, witness });
    }
    let (eigenvalues, lines) = rational_eigenbasis(&dm.phi)?;
    let mut subobjects = Vec::new();
    for mask in 0u32..(1 << d) {
        let idx: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
        let basis = lines.select_cols(&idx);
        if dm.is_stable(&basis) {
            subobjects.push(Subobject { basis, lines: Some(idx) });
        }
    }
    subobjects.sort_by_key(|s| s.dim());
    Ok(SubobjectLattice::Eigenlines { eigenvalues, lines, subobjects })
}

#[derive(Clone, Debug)]
pub struct Admissibility {
    pub admissible: bool,
    pub t_n: Q,
    pub t_h: i64,
    /// A subobject with `t_N - t_H < 0`, or `D` itself when `t_N != t_H`.
    pub witness: Option<(Subobject, Q)>,
}

impl Admissibility {
    pub fn describe(&self) -> String {
        match &self.witness {
            None => "admissible".into(),
            Some((s, deg)) => format!(
                "not admissible: {} has t_N - t_H = {}",
                describe_span(&s.basis),
                crate::arith::fmt_q(deg)
            ),
        }
    }
}

pub fn is_admissible(dm: &FilteredModule) -> Result<Admissibility> {
    let (t_n, t_h) = dm.tn_th();
    let d = dm.dim();
    let mut res = Admissibility { admissible: true, t_n: t_n.clone(), t_h, witness: None };
    if t_n != q(t_h) {
        res.admissible = false;
        let full = Subobject { basis: QMat::identity(d), lines: None };
        res.witness = Some((full, &t_n - q(t_h)));
        return Ok(res);
    }
    match enumerate_subobjects(dm)? {
        SubobjectLattice::Scalar { lambda, best_t_h, witness } => {
            let v = q(vp(dm.p, &lambda).unwrap());
            for k in 1..=d {
                let deg = &v * q(k as i64) - q(best_t_h[k]);
                if deg < Q::zero() {
                    res.admissible = false;
                    res.witness = Some((Subobject { basis: witness[k].clone(), lines: None }, deg));
                    break;
                }
            }
        }
        SubobjectLattice::Eigenlines { subobjects, .. } => {
            for s in subobjects {
                let deg = dm.degree_of(&s.basis);
                if deg < Q::zero() {
                    res.admissible = false;
                    res.witness = Some((s, deg));
                    break;
                }
            }
        }
    }
    Ok(res)
}
