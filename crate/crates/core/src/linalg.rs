//! Small dense linear algebra over exact rings and fields.

use num_traits::{One, Zero};

use crate::arith::{fmt_q, QPoly, Q};

/// Commutative ring with exact equality.
pub trait Ring: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_el(&self) -> bool;
    fn add_el(&self, o: &Self) -> Self;
    fn sub_el(&self, o: &Self) -> Self;
    fn mul_el(&self, o: &Self) -> Self;
    fn neg_el(&self) -> Self {
        self.zero_like().sub_el(self)
    }
}

/// Field: a ring with inverses of nonzero elements.
pub trait Field: Ring {
    fn inv_el(&self) -> Self;
}

impl Ring for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn is_zero_el(&self) -> bool {
        self.is_zero()
    }
    fn add_el(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_el(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_el(&self, o: &Self) -> Self {
        self * o
    }
}

impl Field for Q {
    fn inv_el(&self) -> Self {
        self.recip()
    }
}

impl Ring for QPoly {
    fn zero_like(&self) -> Self {
        QPoly::zero()
    }
    fn one_like(&self) -> Self {
        QPoly::one()
    }
    fn is_zero_el(&self) -> bool {
        self.is_zero()
    }
    fn add_el(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_el(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_el(&self, o: &Self) -> Self {
        self * o
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<R> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<R>,
}

pub type QMat = Matrix<Q>;

impl<R: Clone> Matrix<R> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_cols(cols: &[Vec<R>], nrows: usize) -> Self {
        Self::from_fn(nrows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<R> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<R> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<S: Clone>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn hcat(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        Self::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                o.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }
}

impl<R: Ring> Matrix<R> {
    pub fn filled(rows: usize, cols: usize, v: &R) -> Self {
        Self::from_fn(rows, cols, |_, _| v.clone())
    }

    pub fn identity_like(n: usize, one: &R) -> Self {
        let zero = one.zero_like();
        Self::from_fn(n, n, |i, j| if i == j { one.clone() } else { zero.clone() })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero_el())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let zero = self
            .data
            .first()
            .or(o.data.first())
            .map(|x| x.zero_like());
        Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = zero.clone().expect("nonempty");
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero_el() {
                    continue;
                }
                acc = acc.add_el(&a.mul_el(o.get(k, j)));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[R]) -> Vec<R> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.get(i, 0).zero_like();
                for (k, vk) in v.iter().enumerate() {
                    acc = acc.add_el(&self.get(i, k).mul_el(vk));
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols);
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add_el(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols);
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub_el(b)).collect(),
        }
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|x| x.mul_el(c))
    }

    /// Determinant by cofactor expansion; intended for the small sizes used here.
    pub fn det_cofactor(&self) -> R {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        match n {
            0 => panic!("det of empty matrix needs a ring witness"),
            1 => self.get(0, 0).clone(),
            2 => self
                .get(0, 0)
                .mul_el(self.get(1, 1))
                .sub_el(&self.get(0, 1).mul_el(self.get(1, 0))),
            _ => {
                let mut acc = self.get(0, 0).zero_like();
                for j in 0..n {
                    let a = self.get(0, j);
                    if a.is_zero_el() {
                        continue;
                    }
                    let term = a.mul_el(&self.minor(0, j).det_cofactor());
                    acc = if j % 2 == 0 { acc.add_el(&term) } else { acc.sub_el(&term) };
                }
                acc
            }
        }
    }

    pub fn minor(&self, r: usize, c: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&i| i != r).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&j| j != c).collect();
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Adjugate, so that `m * adj(m) = det(m) I`.
    pub fn adjugate(&self) -> Self {
        let n = self.rows;
        if n == 1 {
            return Self::identity_like(1, &self.get(0, 0).one_like());
        }
        Self::from_fn(n, n, |i, j| {
            let c = self.minor(j, i).det_cofactor();
            if (i + j) % 2 == 0 {
                c
            } else {
                c.neg_el()
            }
        })
    }
}

impl<F: Field> Matrix<F> {
    /// Reduced row echelon form; returns pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero_el()) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv_el();
            for j in 0..m.cols {
                let v = m.get(r, j).mul_el(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero_el() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j).sub_el(&f.mul_el(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, as columns of the returned matrix.
    pub fn kernel(&self, one: &F) -> Self {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        let zero = one.zero_like();
        let mut cols = Vec::new();
        for &f in &free {
            let mut v = vec![zero.clone(); self.cols];
            v[f] = one.clone();
            for (i, &pc) in piv.iter().enumerate() {
                v[pc] = r.get(i, f).neg_el();
            }
            cols.push(v);
        }
        Matrix::from_fn(self.cols, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let one = self.data.first()?.one_like();
        let aug = self.hcat(&Self::identity_like(n, &one));
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(r.submatrix(0, n, n, 2 * n))
    }

    pub fn det(&self) -> F {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = m.data[0].one_like();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m.get(i, c).is_zero_el()) else {
                return det.zero_like();
            };
            if pr != c {
                for j in 0..n {
                    m.data.swap(pr * n + j, c * n + j);
                }
                det = det.neg_el();
            }
            let piv = m.get(c, c).clone();
            det = det.mul_el(&piv);
            let inv = piv.inv_el();
            for i in c + 1..n {
                if m.get(i, c).is_zero_el() {
                    continue;
                }
                let f = m.get(i, c).mul_el(&inv);
                for j in c..n {
                    let v = m.get(i, j).sub_el(&f.mul_el(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Solve `self * x = b` for one solution, if any.
    pub fn solve(&self, b: &Self) -> Option<Self> {
        let aug = self.hcat(b);
        let (r, piv) = aug.rref();
        if piv.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let zero = self.data.first()?.zero_like();
        let mut x = Matrix::filled(self.cols, b.cols, &zero);
        for (i, &pc) in piv.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.get(i, self.cols + j).clone());
            }
        }
        Some(x)
    }

    /// Basis (columns) of the column space, chosen among the original columns.
    pub fn column_basis(&self) -> Self {
        let (_, piv) = self.rref();
        self.select_cols(&piv)
    }
}

impl QMat {
    pub fn identity(n: usize) -> Self {
        Self::identity_like(n, &Q::one())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, &Q::zero())
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 {
            self.inverse().expect("invertible matrix")
        } else {
            self.clone()
        };
        let mut acc = Self::identity(self.rows);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| fmt_q(self.get(i, j))).collect())
            .collect()
    }

    /// Characteristic polynomial `det(X I - self)`.
    pub fn char_poly(&self) -> QPoly {
        let n = self.rows;
        let m: Matrix<QPoly> = Matrix::from_fn(n, n, |i, j| {
            let c = QPoly::constant(-self.get(i, j).clone());
            if i == j {
                &c + &QPoly::x()
            } else {
                c
            }
        });
        if n == 0 {
            QPoly::one()
        } else {
            m.det_cofactor()
        }
    }

    /// Column space of `self` intersected with the column space of `o`.
    pub fn intersect_cols(&self, o: &Self) -> Self {
        if self.cols == 0 || o.cols == 0 {
            return Self::zeros(self.rows, 0);
        }
        let neg = o.map(|x| -x);
        let k = self.hcat(&neg).kernel(&Q::one());
        let top = k.submatrix(0, self.cols, 0, k.cols);
        if top.cols == 0 {
            return Self::zeros(self.rows, 0);
        }
        self.mul(&top).column_basis_or_empty()
    }

    pub fn column_basis_or_empty(&self) -> Self {
        if self.cols == 0 {
            return self.clone();
        }
        self.column_basis()
    }

    pub fn rank_or_zero(&self) -> usize {
        if self.cols == 0 || self.rows == 0 {
            0
        } else {
            self.rank()
        }
    }

    /// Whether every column of `o` lies in the column space of `self`.
    pub fn contains_cols(&self, o: &Self) -> bool {
        if o.cols == 0 {
            return true;
        }
        if self.cols == 0 {
            return o.is_zero();
        }
        self.rank() == self.hcat(o).rank()
    }

    pub fn same_span(&self, o: &Self) -> bool {
        self.contains_cols(o) && o.contains_cols(self)
    }

    /// Extend independent columns to a basis of the ambient space with
    /// standard vectors.
    pub fn extend_to_basis(&self) -> Self {
        let n = self.rows;
        let mut b = self.column_basis_or_empty();
        for i in 0..n {
            if b.cols == n {
                break;
            }
            let e = Self::from_fn(n, 1, |r, _| if r == i { Q::one() } else { Q::zero() });
            let cand = if b.cols == 0 { e.clone() } else { b.hcat(&e) };
            if cand.rank() > b.cols {
                b = cand;
            }
        }
        b
    }
}
