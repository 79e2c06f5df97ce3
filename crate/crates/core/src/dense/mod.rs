//! Dense complex matrices and the per-block kernels the tensor algorithms
//! are built from: LU, Householder QR, complex Schur with reordering,
//! one-sided Jacobi SVD, triangular Sylvester solves and matrix functions.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::Float;

use crate::error::{shape_err, Result, TensorError};
use crate::{C64, ONE, ZERO};

pub mod funm;
pub mod lu;
pub mod qr;
pub mod schur;
pub mod svd;
pub mod sylvester;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape_err(alloc::format!("{} entries for a {}x{} matrix", data.len(), rows, cols)));
        }
        if let Some(i) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(TensorError::NonFinite(i));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let data = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), c, "ragged rows");
                row.iter().map(|&x| C64::new(x, 0.0))
            })
            .collect();
        Self { rows: r, cols: c, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[C64]) {
        for (i, &v) in values.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> C64 {
        self.diag().iter().sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Checked product returning a shape error instead of panicking.
    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(shape_err(alloc::format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            )));
        }
        Ok(self.matmul(other))
    }

    pub fn add_identity(&self, s: C64) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] += s;
        }
        m
    }

    pub fn pow(&self, k: usize) -> Self {
        assert!(self.is_square());
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.matmul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_submatrix(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    /// Selected columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        })
    }

    pub fn block_diag(blocks: &[Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_submatrix(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        (0..self.rows).all(|i| (0..self.cols.min(i)).all(|j| self[(i, j)].norm() <= tol))
    }

    pub fn is_lower_triangular(&self, tol: f64) -> bool {
        (0..self.rows).all(|i| ((i + 1)..self.cols).all(|j| self[(i, j)].norm() <= tol))
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.is_upper_triangular(tol) && self.is_lower_triangular(tol)
    }

    /// Only the diagonal and the first superdiagonal may be non-negligible.
    pub fn is_upper_bidiagonal(&self, tol: f64) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| j == i || j == i + 1 || self[(i, j)].norm() <= tol))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.matmul(rhs)
    }
}

/// Complex Givens rotation `[c s; -conj(s) c]` with real `c`, chosen so that
/// it maps `(a, b)` to `(r, 0)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Givens {
    pub c: f64,
    pub s: C64,
}

impl Givens {
    pub fn zeroing(a: C64, b: C64) -> Self {
        let na = a.norm();
        let nb = b.norm();
        if nb == 0.0 {
            return Self { c: 1.0, s: ZERO };
        }
        if na == 0.0 {
            return Self { c: 0.0, s: ONE };
        }
        let nu = na.hypot(nb);
        Self { c: na / nu, s: (a / na) * b.conj() / nu }
    }

    /// Left application to rows `i`, `k` over columns `cols`.
    pub fn apply_left(&self, m: &mut DenseMatrix, i: usize, k: usize, cols: core::ops::Range<usize>) {
        for j in cols {
            let x = m[(i, j)];
            let y = m[(k, j)];
            m[(i, j)] = x * self.c + self.s * y;
            m[(k, j)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Right application of the adjoint to columns `i`, `k` over `rows`.
    pub fn apply_right_adjoint(&self, m: &mut DenseMatrix, i: usize, k: usize, rows: core::ops::Range<usize>) {
        for r in rows {
            let x = m[(r, i)];
            let y = m[(r, k)];
            m[(r, i)] = x * self.c + self.s.conj() * y;
            m[(r, k)] = -self.s * x + y * self.c;
        }
    }
}

pub(crate) fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn dot_conj(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
