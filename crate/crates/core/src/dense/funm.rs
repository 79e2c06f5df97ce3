//! Dense matrix functions: exponential (scaling and squaring with a degree-13
//! Padé approximant), principal square root of triangular matrices, and the
//! principal logarithm by inverse scaling and squaring on the Schur form.

use alloc::format;

use num_traits::Float;

use super::lu::{upper_triangular_inverse, Lu};
use super::schur::schur;
use super::DenseMatrix;
use crate::error::{Result, TensorError};
use crate::{C64, ONE, ZERO};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn lin3(a: &DenseMatrix, ca: f64, b: &DenseMatrix, cb: f64, c: &DenseMatrix, cc: f64) -> DenseMatrix {
    DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)] * ca + b[(i, j)] * cb + c[(i, j)] * cc)
}

/// Matrix exponential.
pub fn expm(a: &DenseMatrix) -> DenseMatrix {
    assert!(a.is_square());
    let n = a.rows();
    if n == 0 {
        return a.clone();
    }
    let norm = a.norm1();
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale(C64::new(0.5f64.powi(s), 0.0));
    let b = &PADE13;
    let id = DenseMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let u_inner = lin3(&a6, b[13], &a4, b[11], &a2, b[9]);
    let u_tail = &lin3(&a6, b[7], &a4, b[5], &a2, b[3]) + &id.scale(C64::new(b[1], 0.0));
    let u = a.matmul(&(&a6.matmul(&u_inner) + &u_tail));
    let v_inner = lin3(&a6, b[12], &a4, b[10], &a2, b[8]);
    let v_tail = &lin3(&a6, b[6], &a4, b[4], &a2, b[2]) + &id.scale(C64::new(b[0], 0.0));
    let v = &a6.matmul(&v_inner) + &v_tail;
    let mut r = Lu::pivoted(&(&v - &u)).solve(&(&v + &u));
    for _ in 0..s {
        r = r.matmul(&r);
    }
    r
}

/// Principal square root of an upper-triangular matrix with no eigenvalue
/// on the closed negative real axis (`None` when a denominator vanishes).
pub fn sqrtm_upper(t: &DenseMatrix) -> Option<DenseMatrix> {
    let n = t.rows();
    let mut r = DenseMatrix::zeros(n, n);
    for j in 0..n {
        r[(j, j)] = t[(j, j)].sqrt();
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in (i + 1)..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            let d = r[(i, i)] + r[(j, j)];
            if d == ZERO {
                return None;
            }
            r[(i, j)] = s / d;
        }
    }
    Some(r)
}

/// Principal logarithm of an upper-triangular matrix with nonzero diagonal.
pub fn logm_upper(t: &DenseMatrix) -> Result<DenseMatrix> {
    let n = t.rows();
    if t.diag().iter().any(|z| *z == ZERO) {
        return Err(TensorError::Domain("logarithm of a singular matrix".into()));
    }
    let id = DenseMatrix::identity(n);
    let mut x = t.clone();
    let mut roots = 0u32;
    while (&x - &id).norm1() > 0.25 {
        if roots >= 64 {
            return Err(TensorError::Convergence(format!(
                "inverse scaling and squaring needed more than {roots} square roots"
            )));
        }
        x = sqrtm_upper(&x).ok_or_else(|| TensorError::Domain("no principal square root".into()))?;
        roots += 1;
    }
    // log(X) = 2 atanh(Y), Y = (X - I)(X + I)^{-1}; all factors stay upper triangular.
    let y = (&x - &id).matmul(&upper_triangular_inverse(&x.add_identity(ONE)));
    let y2 = y.matmul(&y);
    let mut term = y.clone();
    let mut sum = y.clone();
    let mut k = 1u32;
    loop {
        term = term.matmul(&y2);
        k += 2;
        let contrib = term.scale(C64::new(1.0 / f64::from(k), 0.0));
        let cn = contrib.fro_norm();
        sum = &sum + &contrib;
        if cn <= f64::EPSILON * 1e-2 * sum.fro_norm().max(f64::MIN_POSITIVE) || k > 401 {
            break;
        }
    }
    Ok(sum.scale(C64::new(2.0 * 2f64.powi(roots as i32), 0.0)))
}

/// Principal logarithm of a general square matrix.
pub fn logm(a: &DenseMatrix) -> Result<DenseMatrix> {
    let s = schur(a)?;
    let l = logm_upper(&s.t)?;
    Ok(s.q.matmul(&l).matmul(&s.q.adjoint()))
}

/// Principal square root of a general square matrix.
pub fn sqrtm(a: &DenseMatrix) -> Result<DenseMatrix> {
    let s = schur(a)?;
    let r = sqrtm_upper(&s.t).ok_or_else(|| TensorError::Domain("no principal square root".into()))?;
    Ok(s.q.matmul(&r).matmul(&s.q.adjoint()))
}
