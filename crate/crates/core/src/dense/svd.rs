//! One-sided (Hestenes) Jacobi SVD for complex matrices.

use alloc::vec::Vec;

use num_traits::Float;

use super::{dot_conj, vec_norm, DenseMatrix};
use crate::{C64, ONE, ZERO};

/// Thin SVD `a = u diag(sigma) v^H` with `k = min(m, n)` singular triplets,
/// sorted by decreasing singular value.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

const MAX_SWEEPS: usize = 80;

pub fn svd(a: &DenseMatrix) -> Svd {
    if a.rows() < a.cols() {
        let t = svd_tall(&a.adjoint());
        return Svd { u: t.v, sigma: t.sigma, v: t.u };
    }
    svd_tall(a)
}

fn svd_tall(a: &DenseMatrix) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    // Column-major working copies.
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect()).collect();
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma = dot_conj(&cols[i], &cols[j]);
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, i, j, c, s, phase);
                rotate(&mut vcols, i, j, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| vec_norm(c)).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap_or(core::cmp::Ordering::Equal));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut ucols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let smax = sigma.first().copied().unwrap_or(0.0);
    for (pos, &j) in order.iter().enumerate() {
        let s = sigma[pos];
        if s > smax * eps * (m as f64) && s > 0.0 {
            ucols.push(cols[j].iter().map(|z| z / s).collect());
        } else {
            ucols.push(alloc::vec![ZERO; m]);
        }
    }
    complete_orthonormal(&mut ucols, m, &sigma, smax * eps * (m as f64));
    let u = DenseMatrix::from_fn(m, n, |r, c| ucols[c][r]);
    let v = DenseMatrix::from_fn(n, n, |r, c| vcols[order[c]][r]);
    Svd { u, sigma, v }
}

fn rotate(cols: &mut [Vec<C64>], i: usize, j: usize, c: f64, s: f64, phase: C64) {
    let (left, right) = cols.split_at_mut(j);
    let ci = &mut left[i];
    let cj = &mut right[0];
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let xi = *x;
        let yj = *y;
        *x = xi * c - phase.conj() * yj * s;
        *y = phase * xi * s + yj * c;
    }
}

/// Replaces columns whose singular value is negligible by unit vectors
/// orthogonal to all the others (Gram-Schmidt against the standard basis).
fn complete_orthonormal(ucols: &mut [Vec<C64>], m: usize, sigma: &[f64], cutoff: f64) {
    let n = ucols.len();
    let mut basis_idx = 0usize;
    for k in 0..n {
        if sigma[k] > cutoff && sigma[k] > 0.0 {
            continue;
        }
        while basis_idx < m {
            let mut cand: Vec<C64> = (0..m).map(|r| if r == basis_idx { ONE } else { ZERO }).collect();
            basis_idx += 1;
            for _ in 0..2 {
                for (other_idx, other) in ucols.iter().enumerate() {
                    if other_idx == k || vec_norm(other) == 0.0 {
                        continue;
                    }
                    let proj = dot_conj(other, &cand);
                    for (c, o) in cand.iter_mut().zip(other) {
                        *c -= proj * o;
                    }
                }
            }
            let nrm = vec_norm(&cand);
            if nrm > 0.5 {
                ucols[k] = cand.iter().map(|z| z / nrm).collect();
                break;
            }
        }
    }
}

impl Svd {
    /// Number of singular values above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.sigma.iter().filter(|&&s| s > threshold).count()
    }

    /// `v diag(1/sigma) u^H`, dropping singular values at or below `threshold`.
    pub fn pinv(&self, threshold: f64) -> DenseMatrix {
        let m = self.u.rows();
        let n = self.v.rows();
        let mut out = DenseMatrix::zeros(n, m);
        for (k, &s) in self.sigma.iter().enumerate() {
            if s <= threshold {
                continue;
            }
            for i in 0..n {
                let vik = self.v[(i, k)] / s;
                for j in 0..m {
                    out[(i, j)] += vik * self.u[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let s = DenseMatrix::diagonal(&self.sigma.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        self.u.matmul(&s).matmul(&self.v.adjoint())
    }
}

/// Orthonormal basis of the numerical null space of `a` (right singular
/// vectors with singular value `<= threshold`), as columns.
pub fn null_space(a: &DenseMatrix, threshold: f64) -> DenseMatrix {
    let n = a.cols();
    // Pad short matrices so that all n right singular vectors are available.
    let padded = if a.rows() < n {
        let mut p = DenseMatrix::zeros(n, n);
        p.set_submatrix(0, 0, a);
        p
    } else {
        a.clone()
    };
    let s = svd(&padded);
    let idx: Vec<usize> = (0..n).filter(|&k| s.sigma[k] <= threshold).collect();
    s.v.select_columns(&idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(m: usize, n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(m, n, |i, j| {
            C64::new(((i * 5 + j * 2) as f64 * 0.83).sin(), ((3 * i + j) as f64 * 0.47).cos())
        })
    }

    #[test]
    fn reconstructs_tall_and_wide() {
        for &(m, n) in &[(4, 4), (5, 3), (3, 5), (1, 1), (6, 1)] {
            let a = sample(m, n);
            let s = svd(&a);
            assert!((&s.reconstruct() - &a).fro_norm() < 1e-12 * a.fro_norm(), "{m}x{n}");
            assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rank_deficient_has_unitary_u() {
        let mut a = DenseMatrix::zeros(3, 3);
        a[(0, 0)] = C64::new(2.0, 0.0);
        a[(1, 2)] = C64::new(0.0, 1.0);
        let s = svd(&a);
        assert_eq!(s.rank(1e-12), 2);
        let uu = s.u.adjoint().matmul(&s.u);
        assert!((&uu - &DenseMatrix::identity(3)).fro_norm() < 1e-13);
        let pinv = s.pinv(1e-12);
        let back = a.matmul(&pinv).matmul(&a);
        assert!((&back - &a).fro_norm() < 1e-13);
    }

    #[test]
    fn null_space_of_jordan_block() {
        let a = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let ns = null_space(&a, 1e-12);
        assert_eq!(ns.cols(), 1);
        assert!((ns[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }
}
