//! Dense matrices over the integers, the rationals and the scalar space.

use std::ops::{Add, Mul};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalars::{rat_int, Int, Rat, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IMat = Matrix<Int>;
pub type QMat = Matrix<Rat>;
pub type SMat = Matrix<Scalar>;

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, v: T) -> Self {
        Matrix { rows, cols, data: vec![v; rows * cols] }
    }

    /// Builds from row vectors; `cols` fixes the width when there are no rows.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row);
        }
        Matrix { rows: r, cols, data }
    }

    pub fn from_cols(cols: Vec<Vec<T>>, rows: usize) -> Self {
        let c = cols.len();
        Matrix::from_fn(rows, c, |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Clone>(&self, mut f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(&mut f).collect() }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn push_row(&mut self, row: Vec<T>) {
        assert_eq!(row.len(), self.cols);
        self.data.extend(row);
        self.rows += 1;
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }
}

impl<T: Clone + Zero + Add<Output = T> + Mul<Output = T>> Matrix<T> {
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                acc = acc + a.clone() * other.get(k, j).clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (k, x) in v.iter().enumerate() {
                    acc = acc + self.get(i, k).clone() * x.clone();
                }
                acc
            })
            .collect()
    }
}

pub fn imat_to_q(m: &IMat) -> QMat {
    m.map(rat_int)
}

pub fn qmat_to_s(m: &QMat) -> SMat {
    m.map(|q| Scalar::from_rat(q.clone()))
}

/// Scales every row of a rational matrix to integers (row-wise lcm of
/// denominators); returns the integer matrix and the per-row factors.
pub fn clear_row_denominators(m: &QMat) -> (IMat, Vec<Int>) {
    let mut factors = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        factors.push(m.row(i).iter().fold(Int::one(), |acc, q| acc.lcm(q.denom())));
    }
    let out = Matrix::from_fn(m.rows(), m.cols(), |i, j| (m.get(i, j) * rat_int(&factors[i])).to_integer());
    (out, factors)
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut QMat) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        let Some(p) = (r..m.rows()).find(|&i| !m.get(i, c).is_zero()) else {
            continue;
        };
        m.swap_rows(r, p);
        let inv = m.get(r, c).recip();
        for j in 0..m.cols() {
            let v = m.get(r, j) * &inv;
            m.set(r, j, v);
        }
        for i in 0..m.rows() {
            if i != r && !m.get(i, c).is_zero() {
                let f = m.get(i, c).clone();
                for j in 0..m.cols() {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_q(m: &QMat) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// Basis of the right null space, as columns.
pub fn nullspace_q(m: &QMat) -> QMat {
    let mut w = m.clone();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    let mut basis = QMat::zeros(m.cols(), free.len());
    for (k, &f) in free.iter().enumerate() {
        basis.set(f, k, Rat::one());
        for (r, &p) in pivots.iter().enumerate() {
            basis.set(p, k, -w.get(r, f).clone());
        }
    }
    basis
}

pub fn inverse_q(m: &QMat) -> Option<QMat> {
    let n = m.rows();
    if n != m.cols() {
        return None;
    }
    let mut aug = m.hstack(&QMat::identity(n));
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(Matrix::from_fn(n, n, |i, j| aug.get(i, n + j).clone()))
}

/// Determinant of an integer matrix via fraction-free elimination.
pub fn det_int(m: &IMat) -> Int {
    let n = m.rows();
    assert_eq!(n, m.cols());
    if n == 0 {
        return Int::one();
    }
    let mut a = m.clone();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(p) => {
                    a.swap_rows(k, p);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                a.set(i, j, v);
            }
        }
        prev = a.get(k, k).clone();
    }
    sign * a.get(n - 1, n - 1).clone()
}

pub fn det_q(m: &QMat) -> Rat {
    let n = m.rows();
    let mut a = m.clone();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a.get(i, c).is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap_rows(p, c);
            det = -det;
        }
        let piv = a.get(c, c).clone();
        det *= &piv;
        for i in c + 1..n {
            let f = a.get(i, c) / &piv;
            if f.is_zero() {
                continue;
            }
            for j in c..n {
                let v = a.get(i, j) - &f * a.get(c, j);
                a.set(i, j, v);
            }
        }
    }
    det
}

pub fn is_unimodular(m: &IMat) -> bool {
    m.rows() == m.cols() && det_int(m).abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{int, rat};

    #[test]
    fn rref_and_nullspace() {
        let m = QMat::from_rows(vec![vec![rat(1, 1), rat(2, 1), rat(3, 1)], vec![rat(2, 1), rat(4, 1), rat(6, 1)]], 3);
        let n = nullspace_q(&m);
        assert_eq!(n.cols(), 2);
        assert!(m.mul(&n).is_zero());
        assert_eq!(rank_q(&m), 1);
    }

    #[test]
    fn determinants() {
        let m = IMat::from_rows(vec![vec![int(2), int(4)], vec![int(6), int(8)]], 2);
        assert_eq!(det_int(&m), int(-8));
        assert_eq!(det_q(&imat_to_q(&m)), rat(-8, 1));
        assert!(is_unimodular(&IMat::identity(3)));
        let inv = inverse_q(&imat_to_q(&m)).unwrap();
        assert_eq!(imat_to_q(&m).mul(&inv), QMat::identity(2));
    }
}
