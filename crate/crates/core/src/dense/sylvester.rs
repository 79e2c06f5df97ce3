//! Triangular Sylvester equations `A X - X B = C`.

use super::DenseMatrix;
use crate::ZERO;

/// Solves `a x - x b = c` for upper-triangular `a` (`r x r`) and `b`
/// (`s x s`) by column-wise back substitution. Returns `None` if some
/// `a_ii - b_jj` vanishes (shared eigenvalue).
pub fn solve_triangular_sylvester(a: &DenseMatrix, b: &DenseMatrix, c: &DenseMatrix) -> Option<DenseMatrix> {
    let r = a.rows();
    let s = b.rows();
    assert_eq!((c.rows(), c.cols()), (r, s));
    let mut x = DenseMatrix::zeros(r, s);
    for j in 0..s {
        // (a - b_jj I) x_j = c_j + sum_{k<j} x_k b_kj
        let bjj = b[(j, j)];
        let mut rhs: alloc::vec::Vec<_> = (0..r).map(|i| c[(i, j)]).collect();
        for k in 0..j {
            let bkj = b[(k, j)];
            if bkj == ZERO {
                continue;
            }
            for (i, v) in rhs.iter_mut().enumerate() {
                *v += x[(i, k)] * bkj;
            }
        }
        for i in (0..r).rev() {
            let mut acc = rhs[i];
            for k in (i + 1)..r {
                acc -= a[(i, k)] * x[(k, j)];
            }
            let d = a[(i, i)] - bjj;
            if d == ZERO {
                return None;
            }
            x[(i, j)] = acc / d;
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn residual_vanishes() {
        let a = DenseMatrix::from_fn(3, 3, |i, j| {
            if i <= j {
                C64::new(1.0 + i as f64 + 0.3 * j as f64, 0.2 * j as f64)
            } else {
                ZERO
            }
        });
        let b = DenseMatrix::from_fn(
            2,
            2,
            |i, j| {
                if i <= j {
                    C64::new(-2.0 + 0.5 * j as f64, 1.0 - i as f64)
                } else {
                    ZERO
                }
            },
        );
        let c = DenseMatrix::from_fn(3, 2, |i, j| C64::new(i as f64 - j as f64, 0.5));
        let x = solve_triangular_sylvester(&a, &b, &c).unwrap();
        let res = &(&a.matmul(&x) - &x.matmul(&b)) - &c;
        assert!(res.fro_norm() < 1e-13);
    }

    #[test]
    fn shared_eigenvalue_is_rejected() {
        let a = DenseMatrix::identity(2);
        let b = DenseMatrix::identity(1);
        assert!(solve_triangular_sylvester(&a, &b, &DenseMatrix::zeros(2, 1)).is_none());
    }
}
