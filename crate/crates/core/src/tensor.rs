//! The tensor value type and the structural operators around it.

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Sub};

use num_traits::Float;

use crate::dense::DenseMatrix;
use crate::error::{shape_err, Result, TensorError};
use crate::{Tolerances, C64, ONE, ZERO};

/// Dense complex `n_rows x n_cols x n_slices` tensor. Entries are stored
/// slice-major: slice `k` outermost, then row, then column.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n_rows: usize,
    n_cols: usize,
    n_slices: usize,
    data: Vec<C64>,
}

impl Tensor3 {
    pub fn new(n_rows: usize, n_cols: usize, n_slices: usize, data: Vec<C64>) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 || n_slices == 0 {
            return Err(shape_err(format!("dimensions must be positive, got {n_rows}x{n_cols}x{n_slices}")));
        }
        if data.len() != n_rows * n_cols * n_slices {
            return Err(shape_err(format!("{} entries for a {n_rows}x{n_cols}x{n_slices} tensor", data.len())));
        }
        if let Some(i) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(TensorError::NonFinite(i));
        }
        Ok(Self { n_rows, n_cols, n_slices, data })
    }

    /// Real tensor from slice-major real data.
    pub fn from_real(n_rows: usize, n_cols: usize, n_slices: usize, data: &[f64]) -> Result<Self> {
        Self::new(n_rows, n_cols, n_slices, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(n_rows: usize, n_cols: usize, n_slices: usize) -> Self {
        assert!(n_rows > 0 && n_cols > 0 && n_slices > 0, "dimensions must be positive");
        Self { n_rows, n_cols, n_slices, data: alloc::vec![ZERO; n_rows * n_cols * n_slices] }
    }

    /// Stacks equally shaped frontal slices.
    pub fn from_slices(slices: &[DenseMatrix]) -> Result<Self> {
        let first = slices.first().ok_or_else(|| shape_err("no slices"))?;
        let (m, n) = (first.rows(), first.cols());
        if slices.iter().any(|s| s.rows() != m || s.cols() != n) {
            return Err(shape_err("frontal slices differ in shape"));
        }
        let data = slices.iter().flat_map(|s| s.as_slice().iter().copied()).collect();
        Self::new(m, n, slices.len(), data)
    }

    pub(crate) fn from_parts_unchecked(n_rows: usize, n_cols: usize, n_slices: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), n_rows * n_cols * n_slices);
        Self { n_rows, n_cols, n_slices, data }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn n_slices(&self) -> usize {
        self.n_slices
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.n_rows, self.n_cols, self.n_slices]
    }

    /// Row and column dimensions agree.
    pub fn is_f_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub(crate) fn require_f_square(&self, op: &str) -> Result<usize> {
        if self.is_f_square() {
            Ok(self.n_rows)
        } else {
            Err(shape_err(format!(
                "{op} needs an F-square tensor, got {}x{}x{}",
                self.n_rows, self.n_cols, self.n_slices
            )))
        }
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.data[(k * self.n_rows + i) * self.n_cols + j]
    }

    /// Frontal slice `k` (zero-based).
    pub fn slice(&self, k: usize) -> DenseMatrix {
        let len = self.n_rows * self.n_cols;
        DenseMatrix::from_vec(self.n_rows, self.n_cols, self.data[k * len..(k + 1) * len].to_vec())
            .expect("slice data is consistent")
    }

    pub fn slices(&self) -> Vec<DenseMatrix> {
        (0..self.n_slices).map(|k| self.slice(k)).collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { data: self.data.iter().map(|z| z * s).collect(), ..self.clone() }
    }

    pub fn fro_norm(&self) -> f64 {
        fro_norm(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary part in modulus; zero for real tensors.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    fn check_same_shape(&self, other: &Self) {
        assert_eq!(self.shape(), other.shape(), "tensor shapes differ");
    }
}

impl Add for &Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        self.check_same_shape(rhs);
        Tensor3 { data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(), ..self.clone() }
    }
}

impl Sub for &Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        self.check_same_shape(rhs);
        Tensor3 { data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(), ..self.clone() }
    }
}

/// The `mp x np` block-circulant matrix whose `(i, j)` block is slice
/// `(i - j) mod p`.
pub fn bcirc(a: &Tensor3) -> DenseMatrix {
    let [m, n, p] = a.shape();
    DenseMatrix::from_fn(m * p, n * p, |r, c| {
        let (bi, i) = (r / m, r % m);
        let (bj, j) = (c / n, c % n);
        a.get(i, j, (bi + p - bj) % p)
    })
}

/// Recovers a tensor from its block-circulant image, using the default
/// structure tolerance.
pub fn bcirc_inv(m: &DenseMatrix, n_rows: usize, n_cols: usize, p: usize) -> Result<Tensor3> {
    bcirc_inv_with_tol(m, n_rows, n_cols, p, Tolerances::DEFAULT.structure)
}

/// Recovers a tensor from its block-circulant image. Every block must match
/// the first block column within `rel_tol * max|entry|`.
pub fn bcirc_inv_with_tol(m: &DenseMatrix, n_rows: usize, n_cols: usize, p: usize, rel_tol: f64) -> Result<Tensor3> {
    if m.rows() != n_rows * p || m.cols() != n_cols * p {
        return Err(shape_err(format!(
            "{}x{} matrix does not hold {p}x{p} blocks of {n_rows}x{n_cols}",
            m.rows(),
            m.cols()
        )));
    }
    let mut data = Vec::with_capacity(n_rows * n_cols * p);
    for k in 0..p {
        for i in 0..n_rows {
            for j in 0..n_cols {
                data.push(m[(k * n_rows + i, j)]);
            }
        }
    }
    let t = Tensor3::new(n_rows, n_cols, p, data)?;
    let tolerance = rel_tol * m.max_abs();
    let mut deviation: f64 = 0.0;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let (bi, i) = (r / n_rows, r % n_rows);
            let (bj, j) = (c / n_cols, c % n_cols);
            let d = (m[(r, c)] - t.get(i, j, (bi + p - bj) % p)).norm();
            deviation = deviation.max(d);
        }
    }
    if deviation > tolerance {
        return Err(TensorError::Structure { deviation, tolerance });
    }
    Ok(t)
}

/// Stacks the frontal slices vertically into an `mp x n` matrix.
pub fn unfold(a: &Tensor3) -> DenseMatrix {
    let [m, n, p] = a.shape();
    DenseMatrix::from_vec(m * p, n, a.data.clone()).expect("unfold keeps entry count")
}

/// Inverse of [`unfold`]: splits the rows into `p` slices.
pub fn fold(m: &DenseMatrix, p: usize) -> Result<Tensor3> {
    if p == 0 || m.rows() % p != 0 {
        return Err(shape_err(format!("{} rows are not divisible into {p} slices", m.rows())));
    }
    Tensor3::new(m.rows() / p, m.cols(), p, m.as_slice().to_vec())
}

/// Conjugate transpose: every slice is conjugate transposed and slices
/// `2..p` are taken in reverse order.
pub fn conj_transpose(a: &Tensor3) -> Tensor3 {
    let [m, n, p] = a.shape();
    let mut data = Vec::with_capacity(m * n * p);
    for k in 0..p {
        let src = (p - k) % p;
        for i in 0..n {
            for j in 0..m {
                data.push(a.get(j, i, src).conj());
            }
        }
    }
    Tensor3::from_parts_unchecked(n, m, p, data)
}

/// Identity tensor: first slice `I_n`, all others zero.
pub fn identity_tensor(n: usize, p: usize) -> Tensor3 {
    let mut t = Tensor3::zeros(n, n, p);
    for i in 0..n {
        t.data[i * n + i] = ONE;
    }
    t
}

/// Frobenius norm of `bcirc(a)`, i.e. `sqrt(p)` times the entrywise norm.
pub fn fro_norm(a: &Tensor3) -> f64 {
    let s: f64 = a.data.iter().map(|z| z.norm_sqr()).sum();
    (s * a.n_slices as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn tube(values: &[f64]) -> Tensor3 {
        Tensor3::from_real(1, 1, values.len(), values).unwrap()
    }

    fn sample(m: usize, n: usize, p: usize) -> Tensor3 {
        let data = (0..m * n * p).map(|t| C64::new((t as f64 * 0.77).sin(), (t as f64 * 0.31).cos())).collect();
        Tensor3::new(m, n, p, data).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(Tensor3::new(1, 1, 2, alloc::vec![ONE]), Err(TensorError::Shape(_))));
        assert_eq!(Tensor3::new(1, 1, 1, alloc::vec![C64::new(f64::INFINITY, 0.0)]), Err(TensorError::NonFinite(0)));
    }

    #[test]
    fn bcirc_small_cases() {
        assert_eq!(bcirc(&tube(&[1.0, 2.0])), DenseMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]));
        let (a, b, c) = (r(1.0), r(5.0), C64::new(0.0, 1.0));
        let t = Tensor3::new(1, 1, 3, alloc::vec![a, b, c]).unwrap();
        let expected = DenseMatrix::from_vec(3, 3, alloc::vec![a, c, b, b, a, c, c, b, a]).unwrap();
        assert_eq!(bcirc(&t), expected);
        assert_eq!(bcirc(&identity_tensor(2, 3)), DenseMatrix::identity(6));
    }

    #[test]
    fn bcirc_inverse_cases() {
        let m = DenseMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert_eq!(bcirc_inv(&m, 1, 1, 2).unwrap(), tube(&[1.0, 2.0]));
        assert_eq!(bcirc_inv(&DenseMatrix::identity(6), 2, 2, 3).unwrap(), identity_tensor(2, 3));
        let bad = DenseMatrix::from_real_rows(&[&[1.0, 0.0], &[1.0, 1.0]]);
        assert!(matches!(bcirc_inv(&bad, 1, 1, 2), Err(TensorError::Structure { .. })));
        let a = sample(2, 3, 4);
        assert_eq!(bcirc_inv(&bcirc(&a), 2, 3, 4).unwrap(), a);
    }

    #[test]
    fn unfold_and_fold() {
        assert_eq!(unfold(&tube(&[1.0, 2.0])), DenseMatrix::from_real_rows(&[&[1.0], &[2.0]]));
        let a = sample(3, 2, 4);
        assert_eq!(fold(&unfold(&a), 4).unwrap(), a);
        let e1 = unfold(&identity_tensor(2, 3));
        let mut expected = DenseMatrix::zeros(6, 2);
        expected[(0, 0)] = ONE;
        expected[(1, 1)] = ONE;
        assert_eq!(e1, expected);
        assert!(matches!(fold(&DenseMatrix::zeros(5, 2), 2), Err(TensorError::Shape(_))));
    }

    #[test]
    fn conj_transpose_cases() {
        assert_eq!(conj_transpose(&tube(&[1.0, 2.0])), tube(&[1.0, 2.0]));
        let t = Tensor3::new(1, 1, 3, alloc::vec![C64::new(0.0, 1.0), r(2.0), r(3.0)]).unwrap();
        let expected = Tensor3::new(1, 1, 3, alloc::vec![C64::new(0.0, -1.0), r(3.0), r(2.0)]).unwrap();
        assert_eq!(conj_transpose(&t), expected);
        let a = sample(2, 3, 4);
        assert_eq!(conj_transpose(&conj_transpose(&a)), a);
        assert_eq!(bcirc(&conj_transpose(&a)), bcirc(&a).adjoint());
    }

    #[test]
    fn norms() {
        assert_eq!(fro_norm(&Tensor3::zeros(2, 2, 2)), 0.0);
        assert!((fro_norm(&identity_tensor(2, 3)) - 6f64.sqrt()).abs() < 1e-15);
        // bcirc [[3,4],[4,3]] has Frobenius norm sqrt(9+16+16+9).
        assert!((fro_norm(&tube(&[3.0, 4.0])) - 50f64.sqrt()).abs() < 1e-14);
        let a = sample(3, 2, 5);
        assert!((fro_norm(&a) - bcirc(&a).fro_norm()).abs() < 1e-12);
        assert!((fro_norm(&a) - fro_norm(&conj_transpose(&a))).abs() < 1e-12);
    }
}
