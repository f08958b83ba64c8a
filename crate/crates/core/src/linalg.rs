//! Small dense linear algebra: Cholesky for the SPD tree and graph Laplacian
//! minors, LU with partial pivoting for the low-rank update systems, and
//! conjugate gradients for sparse Laplace problems.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::math;

/// Square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data has wrong length");
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Lower-triangular Cholesky factor `A = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn factor(a: &Matrix) -> Result<Self> {
        let n = a.dim();
        let mut l = Matrix::zeros(n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
            let d = math::sqrt(d);
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                let (ri, rj) = (i * n, j * n);
                for k in 0..j {
                    s -= l.data[ri + k] * l.data[rj + k];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    pub fn ln_det(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| math::ln(self.l[(i, i)])).sum::<f64>()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[(i, k)] * b[k];
            }
            b[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l[(k, i)] * b[k];
            }
            b[i] = s / self.l[(i, i)];
        }
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.dim();
        let mut inv = Matrix::zeros(n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            col.iter_mut().for_each(|c| *c = 0.0);
            col[j] = 1.0;
            self.solve_in_place(&mut col);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn factor(mut a: Matrix) -> Result<Self> {
        let n = a.dim();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| math::abs(a[(i, k)]).total_cmp(&math::abs(a[(j, k)])))
                .unwrap();
            if a[(p, k)] == 0.0 || !a[(p, k)].is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                for j in k + 1..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
            }
        }
        Ok(Self { lu: a, perm, sign })
    }

    pub fn det(&self) -> f64 {
        (0..self.lu.dim()).map(|i| self.lu[(i, i)]).product::<f64>() * self.sign
    }

    /// `(ln|det|, sign)`.
    pub fn ln_abs_det(&self) -> (f64, f64) {
        let mut s = self.sign;
        let mut acc = 0.0;
        for i in 0..self.lu.dim() {
            let d = self.lu[(i, i)];
            if d < 0.0 {
                s = -s;
            }
            acc += math::ln(math::abs(d));
        }
        (acc, s)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.dim();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.lu[(i, k)] * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// Conjugate gradients for an SPD operator given by `apply(x, out)`.
/// Stops when `‖r‖ ≤ tol·‖b‖`.
pub fn conjugate_gradient<F>(apply: F, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let b_norm = math::sqrt(dot(b, b));
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut rr = dot(&r, &r);
    for it in 0..max_iter {
        if math::sqrt(rr) <= tol * b_norm {
            return Ok(x);
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        if it + 1 == max_iter && math::sqrt(rr) > tol * b_norm {
            break;
        }
    }
    if math::sqrt(rr) <= tol * b_norm {
        Ok(x)
    } else {
        Err(Error::NoConvergence { iterations: max_iter, residual: math::sqrt(rr) / b_norm })
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
