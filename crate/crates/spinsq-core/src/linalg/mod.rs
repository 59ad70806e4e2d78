//! Dense complex linear algebra: matrix storage, Hermitian eigendecomposition,
//! positive-semidefiniteness checks and singular values.
//!
//! Everything here works on plain matrices; the quantum-operator layer with
//! site structure sits on top in [`crate::op`].

mod chol;
mod eig;
pub mod mat3;

pub use chol::{is_psd_within, support_blocks};
pub use eig::{herm_eig, BlockEig, EigBlock};

use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> CMat {
        CMat {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> CMat {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> CMat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn all_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        // i-k-j order keeps the inner loops on contiguous rows.
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &r) in orow.iter_mut().zip(rrow) {
                    *o += a * r;
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.at(j, i))
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        let mut out = self.clone();
        for z in &mut out.data {
            *z *= s;
        }
        out
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (z, &r) in out.data.iter_mut().zip(&rhs.data) {
            *z += r;
        }
        out
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (z, &r) in out.data.iter_mut().zip(&rhs.data) {
            *z -= r;
        }
        out
    }

    pub fn add_assign_scaled(&mut self, rhs: &CMat, s: Complex64) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (z, &r) in self.data.iter_mut().zip(&rhs.data) {
            *z += s * r;
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.at(i, i)).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(abs_c(*z)))
    }

    /// Largest `|a_ij - conj(a_ji)|` over all entries.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max(abs_c(self.at(i, j) - self.at(j, i).conj()));
            }
        }
        worst
    }

    /// Replaces the matrix by `(A + A†)/2`.
    pub fn symmetrize_hermitian(&mut self) {
        assert!(self.is_square());
        for i in 0..self.rows {
            for j in i..self.cols {
                let avg = 0.5 * (self.at(i, j) + self.at(j, i).conj());
                *self.at_mut(i, j) = avg;
                *self.at_mut(j, i) = avg.conj();
            }
        }
    }

    /// Kronecker product with the left factor varying slowest.
    pub fn kron(&self, rhs: &CMat) -> CMat {
        let (ra, ca, rb, cb) = (self.rows, self.cols, rhs.rows, rhs.cols);
        let mut out = CMat::zeros(ra * rb, ca * cb);
        for ia in 0..ra {
            for ja in 0..ca {
                let a = self.at(ia, ja);
                if a == ZERO {
                    continue;
                }
                for ib in 0..rb {
                    let dst = (ia * rb + ib) * out.cols + ja * cb;
                    let src = &rhs.data[ib * cb..(ib + 1) * cb];
                    for (jb, &b) in src.iter().enumerate() {
                        out.data[dst + jb] = a * b;
                    }
                }
            }
        }
        out
    }
}

#[inline]
pub(crate) fn abs_c(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Singular values in descending order.
///
/// Small matrices go through the augmented Hermitian form `[[0, M], [M†, 0]]`
/// whose eigenvalues are the signed singular values; this keeps tiny singular
/// values accurate to machine precision instead of the `sqrt(eps)` floor of
/// the Gram route. Very large inputs fall back to the Gram matrix with a
/// noise clamp.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    if !m.all_finite() {
        return Err(Error::Numeric("non-finite entries in singular value input"));
    }
    let (r, c) = (m.rows, m.cols);
    let count = r.min(c);
    if count == 0 {
        return Ok(Vec::new());
    }
    if r + c <= 1024 {
        let n = r + c;
        let mut aug = CMat::zeros(n, n);
        for i in 0..r {
            for j in 0..c {
                let z = m.at(i, j);
                *aug.at_mut(i, r + j) = z;
                *aug.at_mut(r + j, i) = z.conj();
            }
        }
        let (vals, _) = herm_eig(&aug)?;
        // Eigenvalues come ascending as (-sigma..., 0..., +sigma...); the top
        // `count` are the singular values.
        let mut svals: Vec<f64> = vals[n - count..].iter().map(|&v| v.max(0.0)).collect();
        svals.reverse();
        Ok(svals)
    } else {
        let gram = if r <= c {
            m.mul(&m.adjoint())
        } else {
            m.adjoint().mul(m)
        };
        let (vals, _) = herm_eig(&gram)?;
        let cut = vals.last().copied().unwrap_or(0.0).max(0.0)
            * (gram.rows() as f64)
            * f64::EPSILON
            * 8.0;
        let mut svals: Vec<f64> = vals
            .iter()
            .map(|&l| if l > cut { libm::sqrt(l) } else { 0.0 })
            .collect();
        svals.reverse();
        Ok(svals)
    }
}

/// Sum of singular values.
pub fn trace_norm_mat(m: &CMat) -> Result<f64> {
    Ok(singular_values(m)?.iter().sum())
}
