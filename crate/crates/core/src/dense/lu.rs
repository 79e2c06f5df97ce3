//! LU factorization, with and without partial pivoting.

use alloc::vec::Vec;

use super::DenseMatrix;
use crate::{C64, ONE, ZERO};

/// `P A = L U` with unit lower `L`; `perm[i]` is the source row of row `i`.
#[derive(Debug, Clone)]
pub struct Lu {
    packed: DenseMatrix,
    perm: Vec<usize>,
}

/// Failure of an unpivoted elimination: pivot at `step` was below threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroPivot {
    pub step: usize,
}

impl Lu {
    /// Partial-pivoting LU of a square matrix. Never fails; singularity shows
    /// up as a zero (or tiny) diagonal in `U`.
    pub fn pivoted(a: &DenseMatrix) -> Self {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows();
        let mut m = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pivot_row, _) =
                (k..n)
                    .map(|i| (i, m[(i, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_row != k {
                for j in 0..n {
                    let t = m[(k, j)];
                    m[(k, j)] = m[(pivot_row, j)];
                    m[(pivot_row, j)] = t;
                }
                perm.swap(k, pivot_row);
            }
            eliminate(&mut m, k);
        }
        Self { packed: m, perm }
    }

    /// Unpivoted LU; fails at the first pivot with modulus `<= threshold`.
    pub fn unpivoted(a: &DenseMatrix, threshold: f64) -> Result<Self, ZeroPivot> {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows();
        let mut m = a.clone();
        for k in 0..n {
            if m[(k, k)].norm() <= threshold {
                return Err(ZeroPivot { step: k });
            }
            eliminate(&mut m, k);
        }
        Ok(Self { packed: m, perm: (0..n).collect() })
    }

    pub fn dim(&self) -> usize {
        self.packed.rows()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn l(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            core::cmp::Ordering::Greater => self.packed[(i, j)],
            core::cmp::Ordering::Equal => ONE,
            core::cmp::Ordering::Less => ZERO,
        })
    }

    pub fn u(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| if i <= j { self.packed[(i, j)] } else { ZERO })
    }

    /// Permutation matrix `P` with `P A = L U`.
    pub fn p(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| if self.perm[i] == j { ONE } else { ZERO })
    }

    pub fn min_pivot(&self) -> f64 {
        self.packed.diag().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Solves `A X = B`. Assumes the factorization is nonsingular.
    pub fn solve(&self, b: &DenseMatrix) -> DenseMatrix {
        let n = self.dim();
        assert_eq!(b.rows(), n);
        let mut x = DenseMatrix::from_fn(n, b.cols(), |i, j| b[(self.perm[i], j)]);
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.packed[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in (i + 1)..n {
                    s -= self.packed[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.packed[(i, i)];
            }
        }
        x
    }

    pub fn inverse(&self) -> DenseMatrix {
        self.solve(&DenseMatrix::identity(self.dim()))
    }
}

fn eliminate(m: &mut DenseMatrix, k: usize) {
    let n = m.rows();
    let pivot = m[(k, k)];
    if pivot == ZERO {
        return;
    }
    for i in (k + 1)..n {
        let f: C64 = m[(i, k)] / pivot;
        m[(i, k)] = f;
        if f == ZERO {
            continue;
        }
        for j in (k + 1)..n {
            let u = m[(k, j)];
            m[(i, j)] -= f * u;
        }
    }
}

/// Inverse of an upper-triangular matrix by back substitution.
pub fn upper_triangular_inverse(t: &DenseMatrix) -> DenseMatrix {
    let n = t.rows();
    let mut inv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = ONE / t[(j, j)];
        for i in (0..j).rev() {
            let mut s = ZERO;
            for k in (i + 1)..=j {
                s += t[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / t[(i, i)];
        }
    }
    inv
}
