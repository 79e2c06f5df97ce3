//! Householder QR with a nonnegative real diagonal on `R`.

use alloc::vec::Vec;

use super::{dot_conj, vec_norm, DenseMatrix};
use crate::{C64, ZERO};

/// Householder reflector `I - tau v v^H` with `v[0] = 1`, stored from row `start`.
pub(crate) struct Reflector {
    pub start: usize,
    pub v: Vec<C64>,
    pub tau: f64,
}

impl Reflector {
    /// Reflector mapping `x` onto `beta e1`; returns the reflector and `beta`.
    pub fn annihilating(x: &[C64], start: usize) -> (Self, C64) {
        let alpha = x[0];
        let xnorm = vec_norm(x);
        if xnorm == 0.0 || (x[1..].iter().all(|z| *z == ZERO)) {
            return (Self { start, v: alloc::vec![C64::new(1.0, 0.0)], tau: 0.0 }, alpha);
        }
        let phase = if alpha.norm() == 0.0 { C64::new(1.0, 0.0) } else { alpha / alpha.norm() };
        let beta = -phase * xnorm;
        let mut v: Vec<C64> = x.to_vec();
        v[0] = alpha - beta;
        let v0 = v[0];
        for z in v.iter_mut() {
            *z /= v0;
        }
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        (Self { start, v, tau: 2.0 / vnorm2 }, beta)
    }

    /// `M <- H M` restricted to columns `cols`.
    pub fn apply_left(&self, m: &mut DenseMatrix, cols: core::ops::Range<usize>) {
        if self.tau == 0.0 {
            return;
        }
        for j in cols {
            let col: Vec<C64> = (0..self.v.len()).map(|i| m[(self.start + i, j)]).collect();
            let w = dot_conj(&self.v, &col) * self.tau;
            for (i, vi) in self.v.iter().enumerate() {
                m[(self.start + i, j)] -= vi * w;
            }
        }
    }

    /// `M <- M H` restricted to rows `rows`.
    pub fn apply_right(&self, m: &mut DenseMatrix, rows: core::ops::Range<usize>) {
        if self.tau == 0.0 {
            return;
        }
        for r in rows {
            let w: C64 = self.v.iter().enumerate().map(|(i, vi)| m[(r, self.start + i)] * vi).sum::<C64>() * self.tau;
            for (i, vi) in self.v.iter().enumerate() {
                m[(r, self.start + i)] -= w * vi.conj();
            }
        }
    }
}

/// Full QR: `a = q r` with `q` unitary (`m x m`) and `r` upper trapezoidal
/// with real nonnegative diagonal.
pub fn qr(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut q = DenseMatrix::identity(m);
    for k in 0..m.min(n) {
        let x: Vec<C64> = (k..m).map(|i| r[(i, k)]).collect();
        let (h, beta) = Reflector::annihilating(&x, k);
        h.apply_left(&mut r, k..n);
        h.apply_right(&mut q, 0..m);
        r[(k, k)] = beta;
        for i in (k + 1)..m {
            r[(i, k)] = ZERO;
        }
    }
    // Rotate phases so the diagonal of r is real and nonnegative.
    for k in 0..m.min(n) {
        let d = r[(k, k)];
        let mag = d.norm();
        if mag == 0.0 {
            continue;
        }
        let phase = d / mag;
        for j in k..n {
            r[(k, j)] *= phase.conj();
        }
        for i in 0..m {
            q[(i, k)] *= phase;
        }
        r[(k, k)] = C64::new(mag, 0.0);
    }
    (q, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qr_reconstructs_with_positive_diagonal() {
        let a =
            DenseMatrix::from_fn(4, 3, |i, j| C64::new((i * 3 + j) as f64 * 0.37 - 1.0, (i as f64 - j as f64) * 0.21));
        let (q, r) = qr(&a);
        assert!((&q.matmul(&r) - &a).fro_norm() < 1e-13);
        assert!((&q.adjoint().matmul(&q) - &DenseMatrix::identity(4)).fro_norm() < 1e-13);
        assert!(r.is_upper_triangular(0.0));
        for k in 0..3 {
            assert!(r[(k, k)].im == 0.0 && r[(k, k)].re >= 0.0);
        }
    }

    #[test]
    fn qr_of_identity_is_trivial() {
        let (q, r) = qr(&DenseMatrix::identity(3));
        assert_eq!(q, DenseMatrix::identity(3));
        assert_eq!(r, DenseMatrix::identity(3));
    }
}
