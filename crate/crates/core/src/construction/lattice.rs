use num_traits::Zero;

use crate::arith::{factorial, qf, Q};
use crate::error::Result;
use crate::filtered::FilteredModule;
use crate::linalg::QMat;
use crate::local_fields::TSeries;
use crate::robba::{LogRobbaElement, Profile};

/// `ê_i = Σ_k ((p-1)/p)^k / k! · ℓ_X^k N^k(e_i)`, as coordinate vectors on
/// `e_1..e_d`. Column `i` of the result is `ê_i`.
pub fn nzero_frame(dm: &FilteredModule, profile: Profile) -> Vec<Vec<LogRobbaElement>> {
    let d = dm.dim();
    let p = dm.p as i64;
    let c = qf(p - 1, p);
    let ell = LogRobbaElement::ell(profile);
    let mut frame = Vec::new();
    for i in 0..d {
        let mut v: Vec<LogRobbaElement> = (0..d).map(|_| LogRobbaElement::zero(profile)).collect();
        let mut nk = QMat::identity(d);
        let mut k = 0u32;
        loop {
            let col = nk.col(i);
            if col.iter().all(|x| x.is_zero()) {
                break;
            }
            let coef = num_traits::pow::pow(c.clone(), k as usize) / Q::from_integer(factorial(k as u64));
            let lk = ell.pow(k).scale(&coef);
            for (r, x) in col.iter().enumerate() {
                if !x.is_zero() {
                    v[r] = v[r].add(&lk.scale(x));
                }
            }
            nk = dm.nmat.mul(&nk);
            k += 1;
        }
        frame.push(v);
    }
    frame
}

/// Total monodromy `N_ℓ ⊗ 1 + 1 ⊗ N` on a coordinate vector.
pub fn total_monodromy(dm: &FilteredModule, v: &[LogRobbaElement]) -> Vec<LogRobbaElement> {
    let d = dm.dim();
    (0..d)
        .map(|r| {
            let mut acc = v[r].monodromy();
            for (s, x) in v.iter().enumerate() {
                let n = dm.nmat.get(r, s);
                if !n.is_zero() {
                    acc = acc.add(&x.scale(n));
                }
            }
            acc
        })
        .collect()
}

/// Per window level, `M_n = Σ_j t^{-h_j} K_n[[t]] · Φ^n e'_j`.
#[derive(Clone, Debug)]
pub struct LatticeFamily {
    pub adapted: QMat,
    pub weights: Vec<i64>,
    /// `(n, Φ^n B)`.
    pub levels: Vec<(u32, QMat)>,
    /// Pole bound `max |h_j|`.
    pub h: i64,
    pub phi: QMat,
}

impl LatticeFamily {
    pub fn level(&self, n: u32) -> Option<&QMat> {
        self.levels.iter().find(|(m, _)| *m == n).map(|(_, b)| b)
    }

    /// Coordinates of a vector of Laurent series in the lattice basis, with
    /// the `t^{-h_j}` twist removed: the vector lies in `M_n` iff the result
    /// is integral.
    pub fn coordinates(&self, n: u32, v: &[TSeries]) -> Option<Vec<TSeries>> {
        let bn = self.level(n)?;
        let inv = bn.inverse()?;
        let d = v.len();
        Some(
            (0..d)
                .map(|j| {
                    let mut acc = TSeries::zero(&v[0].field, v.iter().map(|s| s.trunc).min().unwrap());
                    for (i, s) in v.iter().enumerate() {
                        let c = inv.get(j, i);
                        if !c.is_zero() {
                            acc = acc.add(&s.scale(c));
                        }
                    }
                    acc.shift(self.weights[j])
                })
                .collect(),
        )
    }
}

pub fn build_lattices(dm: &FilteredModule, profile: Profile) -> Result<LatticeFamily> {
    profile.validate()?;
    let (b, h) = dm.adapted_basis();
    let hmax = h.iter().map(|x| x.abs()).max().unwrap_or(0);
    let levels = profile.levels().map(|n| (n, dm.phi.pow(n as i64).mul(&b))).collect();
    Ok(LatticeFamily { adapted: b, weights: h, levels, h: hmax, phi: dm.phi.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, QPoly};
    use crate::robba::RobbaElement;

    #[test]
    fn frame_without_monodromy_is_standard() {
        let d = FilteredModule::example(1, 2).unwrap();
        let pr = Profile::default();
        let f = nzero_frame(&d, pr);
        assert_eq!(f[0][0], LogRobbaElement::one(pr));
        assert!(f[0][1].is_zero());
    }

    #[test]
    fn frame_with_monodromy() {
        for p in [2u64, 3] {
            let pr = Profile::default().with_p(p);
            let mut d = FilteredModule::example(1, p).unwrap();
            d.nmat = QMat::from_rows(vec![vec![q(0), q(1)], vec![q(0), q(0)]]);
            let f = nzero_frame(&d, pr);
            let want = LogRobbaElement::ell(pr).scale(&qf(p as i64 - 1, p as i64));
            assert_eq!(f[1][0], want);
            assert_eq!(f[1][1], LogRobbaElement::one(pr));
            for v in &f {
                assert!(total_monodromy(&d, v).iter().all(|x| x.is_zero()));
            }
        }
    }

    #[test]
    fn example_lattices() {
        let pr = Profile::default().with_levels(1, 3);
        let d1 = FilteredModule::example(1, 2).unwrap();
        let l1 = build_lattices(&d1, pr).unwrap();
        assert_eq!(l1.weights, vec![1, 0]);
        for n in 1..=3 {
            let b = l1.level(n).unwrap();
            assert_eq!(b.col(0), vec![q(1), crate::arith::ppow(2, n as i64)]);
            assert_eq!(b.col(1), vec![q(1), q(0)]);
        }
        // trivial filtration: standard lattice
        let triv = FilteredModule::new(2, QMat::identity(2), QMat::zeros(2, 2), vec![(0, QMat::identity(2))]).unwrap();
        let lt = build_lattices(&triv, pr).unwrap();
        assert_eq!(lt.weights, vec![0, 0]);
        assert_eq!(lt.h, 0);
        let x = RobbaElement::from_poly(pr, QPoly::from_ints(&[0, 1]));
        let v = vec![x.iota(2).unwrap(), x.iota(2).unwrap()];
        assert!(lt.coordinates(2, &v).unwrap().iter().all(|s| s.is_integral()));
    }
}
