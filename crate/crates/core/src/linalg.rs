//! Small exact matrices and vectors over the base field.
//!
//! Everything here is dimension 2 or 3; the algorithms are the naive exact
//! ones (cofactor inverses, Gaussian kernels), entirely in field arithmetic.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};

pub type Vector = Vec<FieldElem>;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    n: usize,
    a: Vec<FieldElem>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Result<Matrix> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("matrix must be square and nonempty".into()));
        }
        let ctx = rows[0][0].ctx();
        if rows.iter().flatten().any(|x| x.ctx() != ctx) {
            return Err(Error::FieldMismatch("mixed fields in matrix".into()));
        }
        Ok(Matrix {
            n,
            a: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(ctx: FieldCtx, n: usize) -> Matrix {
        let mut a = vec![ctx.zero(); n * n];
        for i in 0..n {
            a[i * n + i] = ctx.one();
        }
        Matrix { n, a }
    }

    pub fn diagonal(entries: &[FieldElem]) -> Matrix {
        let n = entries.len();
        let ctx = entries[0].ctx();
        let mut a = vec![ctx.zero(); n * n];
        for (i, e) in entries.iter().enumerate() {
            a[i * n + i] = e.clone();
        }
        Matrix { n, a }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ctx(&self) -> FieldCtx {
        self.a[0].ctx()
    }

    pub fn at(&self, i: usize, j: usize) -> &FieldElem {
        &self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.a[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.n).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn from_columns(cols: &[Vector]) -> Result<Matrix> {
        let n = cols.len();
        if n == 0 || cols.iter().any(|c| c.len() != n) {
            return Err(Error::Parse("columns must form a square matrix".into()));
        }
        let mut m = Matrix::identity(cols[0][0].ctx(), n);
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let ctx = self.ctx();
        let mut out = Matrix {
            n: self.n,
            a: vec![ctx.zero(); self.n * self.n],
        };
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = ctx.zero();
                for k in 0..self.n {
                    acc = acc.add(&self.at(i, k).mul(rhs.at(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[FieldElem]) -> Vector {
        assert_eq!(self.n, v.len(), "dimension mismatch");
        let ctx = self.ctx();
        (0..self.n)
            .map(|i| {
                let mut acc = ctx.zero();
                for k in 0..self.n {
                    acc = acc.add(&self.at(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, c: &FieldElem) -> Matrix {
        Matrix {
            n: self.n,
            a: self.a.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn det(&self) -> FieldElem {
        match self.n {
            1 => self.at(0, 0).clone(),
            2 => self
                .at(0, 0)
                .mul(self.at(1, 1))
                .sub(&self.at(0, 1).mul(self.at(1, 0))),
            3 => {
                let m = |i: usize, j: usize| self.at(i, j);
                let c0 = m(1, 1).mul(m(2, 2)).sub(&m(1, 2).mul(m(2, 1)));
                let c1 = m(1, 0).mul(m(2, 2)).sub(&m(1, 2).mul(m(2, 0)));
                let c2 = m(1, 0).mul(m(2, 1)).sub(&m(1, 1).mul(m(2, 0)));
                m(0, 0)
                    .mul(&c0)
                    .sub(&m(0, 1).mul(&c1))
                    .add(&m(0, 2).mul(&c2))
            }
            _ => unreachable!("only dimensions 1-3 are used"),
        }
    }

    pub fn inverse(&self) -> Option<Matrix> {
        let det = self.det();
        let det_inv = det.inv()?;
        let adj = match self.n {
            1 => Matrix::diagonal(&[self.ctx().one()]),
            2 => {
                let mut m = Matrix::identity(self.ctx(), 2);
                m.set(0, 0, self.at(1, 1).clone());
                m.set(0, 1, self.at(0, 1).neg());
                m.set(1, 0, self.at(1, 0).neg());
                m.set(1, 1, self.at(0, 0).clone());
                m
            }
            3 => {
                let mut m = Matrix::identity(self.ctx(), 3);
                for i in 0..3 {
                    for j in 0..3 {
                        // cofactor of (j, i), transposed into (i, j)
                        let (r0, r1) = match j {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let (c0, c1) = match i {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let minor = self
                            .at(r0, c0)
                            .mul(self.at(r1, c1))
                            .sub(&self.at(r0, c1).mul(self.at(r1, c0)));
                        let v = if (i + j) % 2 == 0 { minor } else { minor.neg() };
                        m.set(i, j, v);
                    }
                }
                m
            }
            _ => unreachable!(),
        };
        Some(adj.scale(&det_inv))
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.ctx(), self.n)
    }

    /// Matrix power by repeated multiplication (exponents stay tiny here).
    pub fn pow(&self, e: u32) -> Matrix {
        let mut acc = Matrix::identity(self.ctx(), self.n);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn trace(&self) -> FieldElem {
        let mut acc = self.ctx().zero();
        for i in 0..self.n {
            acc = acc.add(self.at(i, i));
        }
        acc
    }

    /// A basis of the (right) kernel, by exact Gaussian elimination.
    pub fn kernel(&self) -> Vec<Vector> {
        let ctx = self.ctx();
        let n = self.n;
        let mut m = self.clone();
        let mut pivot_cols = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if let Some(pr) = (row..n).find(|&r| !m.at(r, col).is_zero()) {
                if pr != row {
                    for j in 0..n {
                        let tmp = m.at(row, j).clone();
                        m.set(row, j, m.at(pr, j).clone());
                        m.set(pr, j, tmp);
                    }
                }
                let inv = m.at(row, col).inv().unwrap();
                for j in 0..n {
                    m.set(row, j, m.at(row, j).mul(&inv));
                }
                for r in 0..n {
                    if r != row && !m.at(r, col).is_zero() {
                        let f = m.at(r, col).clone();
                        for j in 0..n {
                            let v = m.at(r, j).sub(&f.mul(m.at(row, j)));
                            m.set(r, j, v);
                        }
                    }
                }
                pivot_cols.push(col);
                row += 1;
            }
        }
        let mut basis = Vec::new();
        for free in 0..n {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![ctx.zero(); n];
            v[free] = ctx.one();
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = m.at(r, free).neg();
            }
            basis.push(v);
        }
        basis
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

pub fn dot(ctx: FieldCtx, u: &[FieldElem], v: &[FieldElem]) -> FieldElem {
    let mut acc = ctx.zero();
    for (a, b) in u.iter().zip(v) {
        acc = acc.add(&a.mul(b));
    }
    acc
}

pub fn vec_sub(u: &[FieldElem], v: &[FieldElem]) -> Vector {
    u.iter().zip(v).map(|(a, b)| a.sub(b)).collect()
}

pub fn vec_scale(u: &[FieldElem], c: &FieldElem) -> Vector {
    u.iter().map(|a| a.mul(c)).collect()
}

pub fn vec_is_zero(u: &[FieldElem]) -> bool {
    u.iter().all(|a| a.is_zero())
}
