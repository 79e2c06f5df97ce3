//! Brute-force reference implementations on explicit block-circulant
//! matrices. Nothing here uses the Fourier transform or the factorization
//! kernels of [`crate::dense`]; the dense arithmetic is written out with
//! plain loops (Gauss-Jordan elimination, reduced row echelon forms, Taylor
//! series) so that agreement with the fast path is meaningful.
//!
//! Everything except [`dense_tprod`] refuses inputs with `n p > 64`.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{shape_err, Result, TensorError};
use crate::{bcirc, bcirc_inv_with_tol, fold, unfold, DenseMatrix, Tensor3, C64, ONE, ZERO};

/// Largest `n p` accepted by the capped oracles.
pub const ORACLE_LIMIT: usize = 64;

/// Relative pivot threshold of the eliminations.
const PIVOT_TOL: f64 = 1e-9;

/// Structure tolerance when folding oracle results back into tensors.
const CLOSURE_TOL: f64 = 1e-8;

fn cap(a: &Tensor3) -> Result<()> {
    let [m, n, p] = a.shape();
    let size = m.max(n) * p;
    if size > ORACLE_LIMIT {
        return Err(TensorError::OracleTooLarge { size, limit: ORACLE_LIMIT });
    }
    Ok(())
}

fn mul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (m, k, n) = (a.rows(), a.cols(), b.cols());
    assert_eq!(k, b.rows());
    let mut out = DenseMatrix::zeros(m, n);
    for i in 0..m {
        for l in 0..k {
            let x = a[(i, l)];
            if x == ZERO {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += x * b[(l, j)];
            }
        }
    }
    out
}

fn add_scaled(a: &DenseMatrix, b: &DenseMatrix, s: C64) -> DenseMatrix {
    DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)] + s * b[(i, j)])
}

fn adjoint(a: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(a.cols(), a.rows(), |i, j| a[(j, i)].conj())
}

fn eye(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

fn max_entry(a: &DenseMatrix) -> f64 {
    a.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Gauss-Jordan inverse with partial pivoting; `None` for a numerically
/// singular matrix.
fn gauss_jordan_inverse(a: &DenseMatrix) -> Option<DenseMatrix> {
    let n = a.rows();
    let mut m = a.clone();
    let mut inv = eye(n);
    let thr = PIVOT_TOL * 1e-3 * max_entry(a);
    for c in 0..n {
        let piv = (c..n).max_by(|&x, &y| m[(x, c)].norm().total_cmp(&m[(y, c)].norm()))?;
        if !(m[(piv, c)].norm() > thr) {
            return None;
        }
        for j in 0..n {
            let t = m[(c, j)];
            m[(c, j)] = m[(piv, j)];
            m[(piv, j)] = t;
            let t = inv[(c, j)];
            inv[(c, j)] = inv[(piv, j)];
            inv[(piv, j)] = t;
        }
        let d = ONE / m[(c, c)];
        for j in 0..n {
            m[(c, j)] *= d;
            inv[(c, j)] *= d;
        }
        for r in 0..n {
            if r == c {
                continue;
            }
            let f = m[(r, c)];
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                let (mc, ic) = (m[(c, j)], inv[(c, j)]);
                m[(r, j)] -= f * mc;
                inv[(r, j)] -= f * ic;
            }
        }
    }
    Some(inv)
}

/// Full-rank factorization `a = b c` from the reduced row echelon form:
/// `b` holds the pivot columns of `a`, `c` the nonzero rows of the RREF.
fn full_rank_factorization(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    full_rank_factorization_at(a, PIVOT_TOL * max_entry(a))
}

/// Same with an absolute pivot threshold.
fn full_rank_factorization_at(a: &DenseMatrix, thr: f64) -> (DenseMatrix, DenseMatrix) {
    let (rows, cols) = (a.rows(), a.cols());
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let piv = (r..rows).max_by(|&x, &y| m[(x, c)].norm().total_cmp(&m[(y, c)].norm())).unwrap();
        if !(m[(piv, c)].norm() > thr) {
            continue;
        }
        for j in 0..cols {
            let t = m[(r, j)];
            m[(r, j)] = m[(piv, j)];
            m[(piv, j)] = t;
        }
        let d = ONE / m[(r, c)];
        for j in 0..cols {
            m[(r, j)] *= d;
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m[(i, c)];
            if f == ZERO {
                continue;
            }
            for j in 0..cols {
                let v = m[(r, j)];
                m[(i, j)] -= f * v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    let b = DenseMatrix::from_fn(rows, pivots.len(), |i, k| a[(i, pivots[k])]);
    let c = DenseMatrix::from_fn(pivots.len(), cols, |k, j| m[(k, j)]);
    (b, c)
}

/// `fold(bcirc(a) unfold(b))`, no size limit.
pub fn dense_tprod(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let [_, n, p] = a.shape();
    let [n2, _, p2] = b.shape();
    if n != n2 || p != p2 {
        return Err(shape_err("dense_tprod: inner dimensions or slice counts differ"));
    }
    fold(&mul(&bcirc(a), &unfold(b)), p)
}

/// Inverse through Gauss-Jordan elimination of `bcirc(a)`.
pub fn dense_tinv(a: &Tensor3) -> Result<Tensor3> {
    a.require_f_square("dense_tinv")?;
    cap(a)?;
    let [n, _, p] = a.shape();
    let inv = gauss_jordan_inverse(&bcirc(a)).ok_or(TensorError::Singular { block: 1 })?;
    bcirc_inv_with_tol(&inv, n, n, p, CLOSURE_TOL)
}

/// Matrix functions evaluated by the reference path.
#[derive(Debug, Clone, PartialEq)]
pub enum DenseFunction {
    Exp,
    Sin,
    Cos,
    Square,
    /// `sum_k c[k] x^k`.
    Polynomial(Vec<C64>),
}

/// `exp(m)` by scaling and squaring around a plain Taylor series.
fn taylor_expm(m: &DenseMatrix) -> DenseMatrix {
    let n = m.rows();
    let norm1 = (0..n).map(|j| (0..n).map(|i| m[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut s = 0i32;
    while norm1 / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let x = DenseMatrix::from_fn(n, n, |i, j| m[(i, j)] / 2f64.powi(s));
    let mut sum = eye(n);
    let mut term = eye(n);
    for k in 1..=40 {
        term = mul(&term, &x);
        let inv_k = C64::new(1.0 / k as f64, 0.0);
        term = DenseMatrix::from_fn(n, n, |i, j| term[(i, j)] * inv_k);
        sum = add_scaled(&sum, &term, ONE);
        if max_entry(&term) <= 1e-18 * max_entry(&sum) {
            break;
        }
    }
    for _ in 0..s {
        sum = mul(&sum, &sum);
    }
    sum
}

fn apply_dense(m: &DenseMatrix, f: &DenseFunction) -> DenseMatrix {
    let n = m.rows();
    let i = C64::new(0.0, 1.0);
    match f {
        DenseFunction::Exp => taylor_expm(m),
        DenseFunction::Square => mul(m, m),
        DenseFunction::Cos | DenseFunction::Sin => {
            let ip = DenseMatrix::from_fn(n, n, |r, c| m[(r, c)] * i);
            let im = DenseMatrix::from_fn(n, n, |r, c| -m[(r, c)] * i);
            let (ep, em) = (taylor_expm(&ip), taylor_expm(&im));
            if *f == DenseFunction::Cos {
                DenseMatrix::from_fn(n, n, |r, c| (ep[(r, c)] + em[(r, c)]) * 0.5)
            } else {
                DenseMatrix::from_fn(n, n, |r, c| (ep[(r, c)] - em[(r, c)]) * C64::new(0.0, -0.5))
            }
        }
        DenseFunction::Polynomial(c) => {
            let mut acc = DenseMatrix::zeros(n, n);
            for &ck in c.iter().rev() {
                acc = mul(&acc, m);
                for d in 0..n {
                    acc[(d, d)] += ck;
                }
            }
            acc
        }
    }
}

/// `fold(f(bcirc(a)) E_1)`: the first block column of the matrix function
/// of the block-circulant matrix.
pub fn dense_tfunc(a: &Tensor3, f: &DenseFunction) -> Result<Tensor3> {
    let [n, _, p] = a.shape();
    a.require_f_square("dense_tfunc")?;
    cap(a)?;
    let fm = apply_dense(&bcirc(a), f);
    let first = DenseMatrix::from_fn(n * p, n, |r, c| fm[(r, c)]);
    fold(&first, p)
}

/// Like [`dense_tfunc`] but folds the whole matrix back, checking that
/// `f(bcirc(a))` is block circulant.
pub fn dense_tfunc_checked(a: &Tensor3, f: &DenseFunction) -> Result<Tensor3> {
    let [n, _, p] = a.shape();
    a.require_f_square("dense_tfunc")?;
    cap(a)?;
    bcirc_inv_with_tol(&apply_dense(&bcirc(a), f), n, n, p, CLOSURE_TOL)
}

/// Moore-Penrose inverse of `bcirc(a)` from a full-rank factorization
/// `B C`: `C^H (C C^H)^{-1} (B^H B)^{-1} B^H`.
pub fn dense_moore_penrose(a: &Tensor3) -> Result<Tensor3> {
    cap(a)?;
    let [m, n, p] = a.shape();
    let big = bcirc(a);
    let (b, c) = full_rank_factorization(&big);
    if b.cols() == 0 {
        return Ok(Tensor3::zeros(n, m, p));
    }
    let cch = gauss_jordan_inverse(&mul(&c, &adjoint(&c))).ok_or(TensorError::Singular { block: 1 })?;
    let bhb = gauss_jordan_inverse(&mul(&adjoint(&b), &b)).ok_or(TensorError::Singular { block: 1 })?;
    let x = mul(&mul(&adjoint(&c), &cch), &mul(&bhb, &adjoint(&b)));
    bcirc_inv_with_tol(&x, n, m, p, CLOSURE_TOL)
}

/// Drazin inverse of `bcirc(a)` by Cline's iterated full-rank
/// factorizations: with `A_1 = B_1 C_1` and `C_i B_i = B_{i+1} C_{i+1}`,
/// stop at the first `k` where `C_k B_k` is invertible; then
/// `A^D = B_1 ... B_k (C_k B_k)^{-k-1} C_k ... C_1`.
pub fn dense_drazin(a: &Tensor3) -> Result<Tensor3> {
    a.require_f_square("dense_drazin")?;
    cap(a)?;
    let [n, _, p] = a.shape();
    let big = bcirc(a);
    // `B_i` keeps the scale of `bcirc(a)` and `C_i` is O(1), so every
    // iterate `C_i B_i` is judged against the scale of the input.
    let thr = PIVOT_TOL * max_entry(&big);
    let mut bs = Vec::new();
    let mut cs = Vec::new();
    let mut cur = big;
    loop {
        let (b, c) = full_rank_factorization_at(&cur, thr);
        let r = b.cols();
        if r == 0 {
            return Ok(Tensor3::zeros(n, n, p));
        }
        if bs.is_empty() && r == cur.rows() {
            let inv = gauss_jordan_inverse(&cur).ok_or(TensorError::Singular { block: 1 })?;
            return bcirc_inv_with_tol(&inv, n, n, p, CLOSURE_TOL);
        }
        let cb = mul(&c, &b);
        bs.push(b);
        cs.push(c);
        if full_rank_factorization_at(&cb, thr).0.cols() == r {
            let inv = gauss_jordan_inverse(&cb).ok_or(TensorError::Singular { block: 1 })?;
            let k = bs.len();
            let mut middle = eye(r);
            for _ in 0..=k {
                middle = mul(&middle, &inv);
            }
            let mut left = bs[0].clone();
            for b in &bs[1..] {
                left = mul(&left, b);
            }
            let mut right = cs[k - 1].clone();
            for c in cs[..k - 1].iter().rev() {
                right = mul(&right, c);
            }
            let x = mul(&mul(&left, &middle), &right);
            return bcirc_inv_with_tol(&x, n, n, p, CLOSURE_TOL);
        }
        cur = cb;
    }
}

/// `trace(bcirc(a)^j)` for `j = 1..=count`; these equal the power sums
/// `sum lambda^j` over all T-eigenvalues.
pub fn dense_power_sums(a: &Tensor3, count: usize) -> Result<Vec<C64>> {
    a.require_f_square("dense_power_sums")?;
    cap(a)?;
    let big = bcirc(a);
    let mut pw = big.clone();
    let mut out = Vec::with_capacity(count);
    for j in 1..=count {
        if j > 1 {
            pw = mul(&pw, &big);
        }
        out.push((0..pw.rows()).map(|d| pw[(d, d)]).sum());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fro_norm, identity_tensor};

    fn tube(values: &[f64]) -> Tensor3 {
        Tensor3::from_real(1, 1, values.len(), values).unwrap()
    }

    fn close(a: &Tensor3, b: &Tensor3, tol: f64) -> bool {
        fro_norm(&(a - b)) <= tol
    }

    #[test]
    fn product_examples() {
        let a = tube(&[1.0, 2.0]);
        assert!(close(&dense_tprod(&a, &a).unwrap(), &tube(&[5.0, 4.0]), 0.0));
        let b = Tensor3::from_real(2, 2, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]).unwrap();
        assert!(close(&dense_tprod(&b, &identity_tensor(2, 2)).unwrap(), &b, 0.0));
        assert!(matches!(dense_tprod(&b, &a), Err(TensorError::Shape(_))));
    }

    #[test]
    fn function_examples() {
        let z = Tensor3::zeros(2, 2, 3);
        assert!(close(&dense_tfunc(&z, &DenseFunction::Exp).unwrap(), &identity_tensor(2, 3), 0.0));
        let a = tube(&[1.0, -1.0]);
        let e2 = 2f64.exp();
        let want = tube(&[(1.0 + e2) / 2.0, (1.0 - e2) / 2.0]);
        assert!(close(&dense_tfunc(&a, &DenseFunction::Exp).unwrap(), &want, 1e-13));
        assert!(close(&dense_tfunc_checked(&a, &DenseFunction::Square).unwrap(), &tube(&[2.0, -2.0]), 0.0));
    }

    #[test]
    fn inverse_examples() {
        let a = tube(&[1.0, -1.0]);
        assert!(close(&dense_drazin(&a).unwrap(), &tube(&[0.25, -0.25]), 1e-15));
        assert!(close(&dense_moore_penrose(&a).unwrap(), &tube(&[0.25, -0.25]), 1e-15));
        let n = Tensor3::from_real(2, 2, 1, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(dense_drazin(&n).unwrap().max_abs(), 0.0);
        let b = tube(&[1.0, 2.0]);
        assert!(close(&dense_drazin(&b).unwrap(), &tube(&[-1.0 / 3.0, 2.0 / 3.0]), 1e-15));
        assert!(close(&dense_tinv(&b).unwrap(), &tube(&[-1.0 / 3.0, 2.0 / 3.0]), 1e-15));
    }

    #[test]
    fn power_sums_of_two_point_tube() {
        // T-eigenvalues 3 and -1.
        let s = dense_power_sums(&tube(&[1.0, 2.0]), 3).unwrap();
        assert_eq!(s, alloc::vec![C64::new(2.0, 0.0), C64::new(10.0, 0.0), C64::new(26.0, 0.0)]);
    }

    #[test]
    fn refuses_large_inputs() {
        let a = Tensor3::zeros(5, 5, 13);
        assert_eq!(dense_drazin(&a), Err(TensorError::OracleTooLarge { size: 65, limit: 64 }));
        assert!(dense_tprod(&a, &a).is_ok());
    }
}
