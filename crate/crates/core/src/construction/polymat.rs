//! Matrices over Q[X]: Smith form with the left transform, unimodular inverses.

use num_traits::Zero;

use crate::arith::{QPoly, Q};
use crate::linalg::{Matrix, QMat};

pub type PolyMat = Matrix<QPoly>;

pub fn from_qmat(m: &QMat) -> PolyMat {
    m.map(|x| QPoly::constant(x.clone()))
}

pub fn scale_col(m: &mut PolyMat, j: usize, f: &QPoly) {
    for i in 0..m.rows {
        let v = m.get(i, j) * f;
        m.set(i, j, v);
    }
}

/// `A = P · [diag(s) | 0] · V` with `P`, `V` unimodular; returns `(P, s)` with
/// `s` monic and each dividing the next. The column span of `A` is
/// `P · diag(s) · Q[X]^d`.
pub fn smith_left(a: &PolyMat) -> (PolyMat, Vec<QPoly>) {
    let d = a.rows;
    let mut m = a.clone();
    let mut p = PolyMat::identity_like(d, &QPoly::one());
    let mut s = Vec::new();
    for k in 0..d.min(m.cols) {
        loop {
            // smallest-degree nonzero entry of the trailing block
            let mut best: Option<(usize, usize, usize)> = None;
            for i in k..d {
                for j in k..m.cols {
                    if let Some(dg) = m.get(i, j).deg() {
                        if best.is_none_or(|(_, _, b)| dg < b) {
                            best = Some((i, j, dg));
                        }
                    }
                }
            }
            let Some((bi, bj, _)) = best else {
                return (p, s);
            };
            swap_rows(&mut m, &mut p, k, bi);
            swap_cols(&mut m, k, bj);
            let piv = m.get(k, k).clone();
            let mut clean = true;
            for i in k + 1..d {
                let (quo, rem) = m.get(i, k).divrem(&piv);
                if !quo.is_zero() {
                    add_row(&mut m, &mut p, i, k, &-&quo);
                }
                clean &= rem.is_zero();
            }
            for j in k + 1..m.cols {
                let (quo, rem) = m.get(k, j).divrem(&piv);
                if !quo.is_zero() {
                    add_col(&mut m, j, k, &-&quo);
                }
                clean &= rem.is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility of the rest of the block
            let bad = (k + 1..d).find(|&i| (k + 1..m.cols).any(|j| !m.get(i, j).rem(&piv).is_zero()));
            match bad {
                Some(i) => add_row(&mut m, &mut p, k, i, &QPoly::one()),
                None => break,
            }
        }
        let lc = m.get(k, k).leading();
        // row k scaled by 1/lc: P column k scaled by lc
        for j in 0..m.cols {
            let v = m.get(k, j).scale(&lc.recip());
            m.set(k, j, v);
        }
        scale_col(&mut p, k, &QPoly::constant(lc));
        s.push(m.get(k, k).clone());
    }
    (p, s)
}

fn swap_rows(m: &mut PolyMat, p: &mut PolyMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols {
        let x = m.get(a, j).clone();
        let y = m.get(b, j).clone();
        m.set(a, j, y);
        m.set(b, j, x);
    }
    swap_cols(p, a, b);
}

fn swap_cols(m: &mut PolyMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows {
        let x = m.get(i, a).clone();
        let y = m.get(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

/// Row `dst += c · row src`, keeping `A = P · M · V` (so `P` col `src -= c · col dst`).
fn add_row(m: &mut PolyMat, p: &mut PolyMat, dst: usize, src: usize, c: &QPoly) {
    for j in 0..m.cols {
        let v = m.get(dst, j) + &(c * m.get(src, j));
        m.set(dst, j, v);
    }
    for i in 0..p.rows {
        let v = p.get(i, src) - &(c * p.get(i, dst));
        p.set(i, src, v);
    }
}

/// Column `dst += c · col src`.
fn add_col(m: &mut PolyMat, dst: usize, src: usize, c: &QPoly) {
    for i in 0..m.rows {
        let v = m.get(i, dst) + &(c * m.get(i, src));
        m.set(i, dst, v);
    }
}

/// Inverse of a matrix with nonzero constant determinant.
pub fn unimodular_inverse(m: &PolyMat) -> Option<PolyMat> {
    let det = m.det_cofactor();
    if det.deg() != Some(0) {
        return None;
    }
    let inv = det.coeff(0).recip();
    Some(m.adjugate().map(|x| x.scale(&inv)))
}

pub fn det_constant(m: &PolyMat) -> Option<Q> {
    let det = m.det_cofactor();
    (det.deg() == Some(0)).then(|| det.coeff(0))
}

pub fn max_degree(m: &PolyMat) -> usize {
    m.data_iter().filter_map(|x| x.deg()).max().unwrap_or(0)
}

impl PolyMat {
    pub fn data_iter(&self) -> impl Iterator<Item = &QPoly> {
        (0..self.rows).flat_map(move |i| (0..self.cols).map(move |j| self.get(i, j)))
    }
}

pub fn is_unit_matrix(m: &PolyMat) -> bool {
    det_constant(m).is_some_and(|c| !c.is_zero())
}

pub fn identity(d: usize) -> PolyMat {
    PolyMat::identity_like(d, &QPoly::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    fn p(c: &[i64]) -> QPoly {
        QPoly::from_ints(c)
    }

    #[test]
    fn smith_of_diagonal_lattice() {
        // columns (1, 0), (0, X+2), (X, X^2+2X)
        let a = PolyMat::from_rows(vec![
            vec![p(&[1]), p(&[0]), p(&[0, 1])],
            vec![p(&[0]), p(&[2, 1]), p(&[0, 2, 1])],
        ]);
        let (pm, s) = smith_left(&a);
        assert_eq!(s, vec![p(&[1]), p(&[2, 1])]);
        assert!(is_unit_matrix(&pm));
        // span equality: P diag(s) columns lie in span(A) and conversely
        let mut ps = pm.clone();
        for (k, sk) in s.iter().enumerate() {
            scale_col(&mut ps, k, sk);
        }
        let inv = unimodular_inverse(&pm).unwrap();
        let coords = inv.mul(&a);
        for j in 0..a.cols {
            for (k, sk) in s.iter().enumerate() {
                assert!(coords.get(k, j).rem(sk).is_zero());
            }
        }
    }

    #[test]
    fn smith_needs_divisibility_fix() {
        // diag(X, X+1) has invariant factors 1, X(X+1)
        let a = PolyMat::from_rows(vec![vec![p(&[0, 1]), p(&[0])], vec![p(&[0]), p(&[1, 1])]]);
        let (pm, s) = smith_left(&a);
        assert_eq!(s, vec![p(&[1]), p(&[0, 1, 1])]);
        assert!(is_unit_matrix(&pm));
        assert_eq!(det_constant(&identity(2)), Some(q(1)));
    }
}
