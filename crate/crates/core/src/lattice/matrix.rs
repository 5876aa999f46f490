use std::fmt;

use crate::local_ring::{Ext, Q};
use num::traits::Zero;

/// Dense matrix over `F`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub pi0: i64,
    data: Vec<Ext>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, pi0: i64) -> Self {
        let z = Ext::from_base(Q::zero(), pi0);
        Matrix { rows, cols, pi0, data: vec![z; rows * cols] }
    }

    pub fn identity(n: usize, pi0: i64) -> Self {
        let mut m = Self::zeros(n, n, pi0);
        for i in 0..n {
            m[(i, i)] = Ext::from_base(num::one(), pi0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Ext>>, pi0: i64) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<Ext> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c, "ragged rows");
        Matrix { rows: r, cols: c, pi0, data }
    }

    pub fn from_cols(cols: &[Vec<Ext>], rows: usize, pi0: i64) -> Self {
        let mut m = Self::zeros(rows, cols.len(), pi0);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m[(i, j)] = c[i].clone();
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec<Ext> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn cols_vec(&self) -> Vec<Vec<Ext>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Ext> {
        self.data.iter()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols, self.pi0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Ext]) -> Vec<Ext> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Ext::from_base(Q::zero(), self.pi0), |acc, k| {
                    acc + &self[(i, k)] * &v[k]
                })
            })
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows, self.pi0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)] == self[(j, i)].conj()))
    }

    pub fn scale(&self, c: &Ext) -> Matrix {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = &*x * c;
        }
        out
    }

    pub fn hcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut cols = self.cols_vec();
        cols.extend(other.cols_vec());
        Matrix::from_cols(&cols, self.rows, self.pi0)
    }

    pub fn block_diag(blocks: &[Matrix], pi0: i64) -> Matrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Matrix::zeros(n, n, pi0);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(off + i, off + j)] = b[(i, j)].clone();
                }
            }
            off += b.rows;
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(rows.len(), cols.len(), self.pi0);
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&rows, cols)
    }

    /// Determinant by Gaussian elimination over `F`.
    pub fn det(&self) -> Ext {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Ext::from_base(num::one(), self.pi0);
        for c in 0..n {
            let Some(piv) = (c..n).find(|&r| !m[(r, c)].is_zero()) else {
                return Ext::from_base(Q::zero(), self.pi0);
            };
            if piv != c {
                m.swap_rows(piv, c);
                det = -det;
            }
            let inv = m[(c, c)].inv().unwrap();
            det = &det * &m[(c, c)];
            for r in (c + 1)..n {
                if m[(r, c)].is_zero() {
                    continue;
                }
                let f = &m[(r, c)] * &inv;
                for j in c..n {
                    let t = &f * &m[(c, j)];
                    m[(r, j)] = &m[(r, j)] - &t;
                }
            }
        }
        det
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Inverse by Gauss-Jordan elimination; `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n, self.pi0);
        for c in 0..n {
            let piv = (c..n).find(|&r| !a[(r, c)].is_zero())?;
            a.swap_rows(piv, c);
            inv.swap_rows(piv, c);
            let s = a[(c, c)].inv()?;
            for j in 0..n {
                a[(c, j)] = &a[(c, j)] * &s;
                inv[(c, j)] = &inv[(c, j)] * &s;
            }
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone();
                for j in 0..n {
                    let t = &f * &a[(c, j)];
                    a[(r, j)] = &a[(r, j)] - &t;
                    let t = &f * &inv[(c, j)];
                    inv[(r, j)] = &inv[(r, j)] - &t;
                }
            }
        }
        Some(inv)
    }

    /// Solve `self · x = b` for square invertible `self`.
    pub fn solve(&self, b: &[Ext]) -> Option<Vec<Ext>> {
        Some(self.inverse()?.mul_vec(b))
    }

    /// `A* G B` for column bases `A`, `B`.
    pub fn sesquilinear(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a.adjoint().mul(self).mul(b)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Ext;
    fn index(&self, (i, j): (usize, usize)) -> &Ext {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Ext {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}
