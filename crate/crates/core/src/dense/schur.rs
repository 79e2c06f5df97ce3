//! Complex Schur decomposition `A = Q T Q^H` by Hessenberg reduction and
//! shifted QR iteration, plus reordering of the triangular factor.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use super::qr::Reflector;
use super::{DenseMatrix, Givens};
use crate::error::{Result, TensorError};
use crate::{C64, ZERO};

#[derive(Debug, Clone)]
pub struct Schur {
    /// Unitary factor.
    pub q: DenseMatrix,
    /// Upper-triangular factor; its diagonal carries the eigenvalues.
    pub t: DenseMatrix,
}

/// Reduces `a` to upper Hessenberg form: returns `(q, h)` with `a = q h q^H`.
pub fn hessenberg(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = DenseMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let (refl, beta) = Reflector::annihilating(&x, k + 1);
        refl.apply_left(&mut h, k..n);
        refl.apply_right(&mut h, 0..n);
        refl.apply_right(&mut q, 0..n);
        h[(k + 1, k)] = beta;
        for i in (k + 2)..n {
            h[(i, k)] = ZERO;
        }
    }
    (q, h)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let mu1 = mid + disc;
    let mu2 = mid - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// Complex Schur decomposition of a square matrix.
pub fn schur(a: &DenseMatrix) -> Result<Schur> {
    assert!(a.is_square(), "Schur needs a square matrix");
    let n = a.rows();
    let (mut q, mut t) = hessenberg(a);
    if n <= 1 {
        return Ok(Schur { q, t });
    }
    let norm = t.fro_norm();
    let eps = f64::EPSILON;
    let max_iter = 60 * n;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let mut local = t[(lo, lo)].norm() + t[(lo - 1, lo - 1)].norm();
            if local == 0.0 {
                local = norm;
            }
            if sub <= eps * local || sub <= f64::MIN_POSITIVE {
                t[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(TensorError::Convergence(format!(
                "complex Schur iteration exceeded {max_iter} sweeps on a {n}x{n} block"
            )));
        }
        let mu = if iter % 11 == 0 {
            // Exceptional shift to break cycles.
            t[(hi, hi)] + C64::new(0.75, 0.43) * t[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };
        for k in lo..=hi {
            t[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let g = Givens::zeroing(t[(k, k)], t[(k + 1, k)]);
            g.apply_left(&mut t, k, k + 1, k..n);
            t[(k + 1, k)] = ZERO;
            rots.push(g);
        }
        for (idx, g) in rots.iter().enumerate() {
            let k = lo + idx;
            g.apply_right_adjoint(&mut t, k, k + 1, 0..(k + 2).min(hi + 1));
            g.apply_right_adjoint(&mut q, k, k + 1, 0..n);
        }
        for k in lo..=hi {
            t[(k, k)] += mu;
        }
    }
    for i in 1..n {
        for j in 0..i {
            t[(i, j)] = ZERO;
        }
    }
    Ok(Schur { q, t })
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.t.diag()
    }

    /// Swaps the adjacent diagonal entries `k` and `k + 1` with a unitary
    /// rotation, keeping `A = Q T Q^H`.
    pub fn swap_adjacent(&mut self, k: usize) {
        let n = self.t.rows();
        let a = self.t[(k, k)];
        let b = self.t[(k, k + 1)];
        let d = self.t[(k + 1, k + 1)];
        // Eigenvector of the 2x2 block for eigenvalue d is (b, d - a).
        let x0 = b;
        let x1 = d - a;
        let nu = x0.norm().hypot(x1.norm());
        if nu == 0.0 {
            return;
        }
        // Unitary G whose first column is (x0, x1)/nu; apply T <- G^H T G.
        let c0 = x0 / nu;
        let c1 = x1 / nu;
        for j in 0..n {
            let u = self.t[(k, j)];
            let v = self.t[(k + 1, j)];
            self.t[(k, j)] = c0.conj() * u + c1.conj() * v;
            self.t[(k + 1, j)] = -c1 * u + c0 * v;
        }
        for r in 0..n {
            let u = self.t[(r, k)];
            let v = self.t[(r, k + 1)];
            self.t[(r, k)] = u * c0 + v * c1;
            self.t[(r, k + 1)] = -u * c1.conj() + v * c0.conj();
        }
        for r in 0..n {
            let u = self.q[(r, k)];
            let v = self.q[(r, k + 1)];
            self.q[(r, k)] = u * c0 + v * c1;
            self.q[(r, k + 1)] = -u * c1.conj() + v * c0.conj();
        }
        self.t[(k + 1, k)] = ZERO;
        self.t[(k, k)] = d;
        self.t[(k + 1, k + 1)] = a;
    }

    /// Stable reordering so that diagonal position `i` ends up holding an
    /// eigenvalue whose group id is non-decreasing along the diagonal.
    /// `groups[i]` is the group of the eigenvalue currently at position `i`.
    /// Entries in the same group never swap with each other.
    pub fn reorder_by_group(&mut self, groups: &[usize]) -> Vec<usize> {
        let n = groups.len();
        let mut g = groups.to_vec();
        // Bubble sort on adjacent swaps between different groups.
        for pass in 0..n {
            let mut swapped = false;
            for k in 0..n.saturating_sub(1 + pass) {
                if g[k] > g[k + 1] {
                    self.swap_adjacent(k);
                    g.swap(k, k + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        g
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.q.matmul(&self.t).matmul(&self.q.adjoint())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |i, j| {
            C64::new(((i * 7 + j * 3) as f64 * 0.61).sin(), ((i + 5 * j) as f64 * 0.3).cos())
        })
    }

    #[test]
    fn schur_reconstructs() {
        for n in 1..7 {
            let a = sample(n);
            let s = schur(&a).unwrap();
            let err = (&s.reconstruct() - &a).fro_norm();
            assert!(err < 1e-12 * a.fro_norm().max(1.0), "n={n} err={err}");
            assert!(s.t.is_upper_triangular(0.0));
            let unit = (&s.q.adjoint().matmul(&s.q) - &DenseMatrix::identity(n)).fro_norm();
            assert!(unit < 1e-12);
        }
    }

    #[test]
    fn trace_is_preserved() {
        let a = sample(5);
        let s = schur(&a).unwrap();
        let sum: C64 = s.eigenvalues().iter().sum();
        assert!((sum - a.trace()).norm() < 1e-12);
    }

    #[test]
    fn real_rotation_gets_complex_pair() {
        let a = DenseMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let s = schur(&a).unwrap();
        let mut ev = s.eigenvalues();
        ev.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert!((ev[0] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - C64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn jordan_block_is_already_schur() {
        let a = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let s = schur(&a).unwrap();
        assert!(s.eigenvalues().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn reorder_moves_groups_and_keeps_similarity() {
        let a = sample(5);
        let mut s = schur(&a).unwrap();
        let ev = s.eigenvalues();
        // Push the eigenvalue of largest modulus to the end.
        let big = (0..5).max_by(|&i, &j| ev[i].norm().partial_cmp(&ev[j].norm()).unwrap()).unwrap();
        let groups: Vec<usize> = (0..5).map(|i| usize::from(i == big)).collect();
        s.reorder_by_group(&groups);
        assert!((s.t[(4, 4)] - ev[big]).norm() < 1e-12);
        assert!((&s.reconstruct() - &a).fro_norm() < 1e-12 * a.fro_norm());
    }
}
