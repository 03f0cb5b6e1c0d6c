use std::sync::Arc;

use crate::kernel::{RatFn, Var};

/// A single coordinate chart `x1..xm`. `m = 0` is a point.
#[derive(Debug, PartialEq, Eq)]
pub struct Chart {
    pub name: String,
    pub vars: Vec<Var>,
}

impl Chart {
    pub fn new(name: &str, var_names: &[&str]) -> Arc<Chart> {
        Arc::new(Chart { name: name.to_string(), vars: var_names.iter().map(|n| Var::new(n)).collect() })
    }

    pub fn from_vars(name: &str, vars: Vec<Var>) -> Arc<Chart> {
        Arc::new(Chart { name: name.to_string(), vars })
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn coord(&self, j: usize) -> RatFn {
        RatFn::var(self.vars[j])
    }

    pub fn var_names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name()).collect()
    }

    /// `X(f) = Σ X_j ∂f/∂x_j`.
    pub fn apply(&self, x: &[RatFn], f: &RatFn) -> RatFn {
        self.vars
            .iter()
            .zip(x)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&v, c)| c * &f.partial(v))
            .sum()
    }

    pub fn bracket(&self, x: &[RatFn], y: &[RatFn]) -> Vec<RatFn> {
        (0..self.dim()).map(|j| &self.apply(x, &y[j]) - &self.apply(y, &x[j])).collect()
    }

    pub fn gradient(&self, f: &RatFn) -> Vec<RatFn> {
        self.vars.iter().map(|&v| f.partial(v)).collect()
    }

    pub fn coord_field(&self, j: usize) -> Vec<RatFn> {
        (0..self.dim()).map(|k| if k == j { RatFn::one() } else { RatFn::zero() }).collect()
    }
}

pub fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || a.vars == b.vars
}

/// Componentwise helpers for vectors of coefficient functions.
pub mod vecops {
    use crate::kernel::RatFn;

    pub fn zeros(n: usize) -> Vec<RatFn> {
        vec![RatFn::zero(); n]
    }

    pub fn unit(n: usize, i: usize) -> Vec<RatFn> {
        (0..n).map(|k| if k == i { RatFn::one() } else { RatFn::zero() }).collect()
    }

    pub fn add(a: &[RatFn], b: &[RatFn]) -> Vec<RatFn> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(a: &[RatFn], b: &[RatFn]) -> Vec<RatFn> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn scale(f: &RatFn, a: &[RatFn]) -> Vec<RatFn> {
        a.iter().map(|x| f * x).collect()
    }

    pub fn neg(a: &[RatFn]) -> Vec<RatFn> {
        a.iter().map(|x| -x).collect()
    }

    pub fn dot(a: &[RatFn], b: &[RatFn]) -> RatFn {
        a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
    }

    pub fn is_zero(a: &[RatFn]) -> bool {
        a.iter().all(RatFn::is_zero)
    }
}

/// Dense square or rectangular matrix of coefficient functions, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<RatFn>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![RatFn::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, RatFn::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RatFn>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFn {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFn) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<RatFn> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<RatFn> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows);
        let mut out = Matrix::zero(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let v = (0..self.cols)
                    .filter(|&k| !self.get(i, k).is_zero() && !o.get(k, j).is_zero())
                    .map(|k| self.get(i, k) * o.get(k, j))
                    .sum();
                out.set(i, j, v);
            }
        }
        out
    }

    /// `M v` for a column vector.
    pub fn apply(&self, v: &[RatFn]) -> Vec<RatFn> {
        (0..self.rows).map(|i| vecops::dot(&self.row(i), v)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: vecops::add(&self.data, &o.data) }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: vecops::sub(&self.data, &o.data) }
    }

    pub fn scale(&self, f: &RatFn) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: vecops::scale(f, &self.data) }
    }

    pub fn is_zero(&self) -> bool {
        vecops::is_zero(&self.data)
    }

    pub fn pow(&self, n: u32) -> Matrix {
        (0..n).fold(Matrix::identity(self.rows), |acc, _| acc.mul(self))
    }
}
