//! The T-product and what follows directly from it.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::dense::lu::Lu;
use crate::dense::svd::svd;
use crate::dense::DenseMatrix;
use crate::error::{shape_err, Result, TensorError};
use crate::transform::{from_blocks, to_blocks, to_blocks_rect, FourierBlocks};
use crate::{conj_transpose, fro_norm, identity_tensor, Tensor3, Tolerances, C64};

/// T-product `a * b` of an `m x n x p` and an `n x s x p` tensor.
pub fn tprod(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let [m, n, p] = a.shape();
    let [n2, s, p2] = b.shape();
    if n != n2 || p != p2 {
        return Err(shape_err(format!("cannot T-multiply {m}x{n}x{p} by {n2}x{s}x{p2}")));
    }
    let fa = to_blocks_rect(a);
    let fb = to_blocks_rect(b);
    Ok(from_blocks(&blockwise_product(&fa, &fb)))
}

pub(crate) fn blockwise_product(a: &FourierBlocks, b: &FourierBlocks) -> FourierBlocks {
    a.map(|i, d| d.matmul(b.block(i)))
}

/// `a * b * c` for conformable tensors.
pub fn tprod3(a: &Tensor3, b: &Tensor3, c: &Tensor3) -> Result<Tensor3> {
    tprod(&tprod(a, b)?, c)
}

/// Inverse of Fourier block `index`; singular when its smallest singular
/// value is at most `tol.rank` times the larger of its norm and `top`, the
/// norm of the largest block of the tensor.
pub(crate) fn block_inverse(d: &DenseMatrix, index: usize, top: f64, tol: &Tolerances) -> Result<DenseMatrix> {
    let s = svd(d);
    let smin = s.sigma.last().copied().unwrap_or(0.0);
    if smin <= tol.rank * d.fro_norm().max(top) || smin == 0.0 {
        return Err(TensorError::Singular { block: index + 1 });
    }
    Ok(Lu::pivoted(d).inverse())
}

/// T-inverse of an F-square tensor.
pub fn tinv(a: &Tensor3, tol: &Tolerances) -> Result<Tensor3> {
    let blocks = to_blocks(a)?;
    let top = blocks.max_block_norm();
    Ok(from_blocks(&blocks.try_map(|i, d| block_inverse(d, i, top, tol))?))
}

/// `k`-fold T-product of `a` with itself; `k = 0` gives the identity.
pub fn tpow(a: &Tensor3, k: usize) -> Result<Tensor3> {
    let blocks = to_blocks(a)?;
    Ok(from_blocks(&blocks.map(|_, d| d.pow(k))))
}

/// `sum_i coeffs[i] a^i`, by Horner's rule on every Fourier block.
pub fn tpoly_eval(coeffs: &[C64], a: &Tensor3) -> Result<Tensor3> {
    let blocks = to_blocks(a)?;
    Ok(from_blocks(&blocks.map(|_, d| horner(coeffs, d))))
}

pub(crate) fn horner(coeffs: &[C64], d: &DenseMatrix) -> DenseMatrix {
    let n = d.rows();
    let mut acc = DenseMatrix::zeros(n, n);
    for &c in coeffs.iter().rev() {
        acc = acc.matmul(d).add_identity(c);
    }
    acc
}

/// `a * b - b * a`.
pub fn commutator(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    a.require_f_square("commutator")?;
    if a.shape() != b.shape() {
        return Err(shape_err("commutator needs tensors of equal shape"));
    }
    Ok(&tprod(a, b)? - &tprod(b, a)?)
}

/// Structural properties checked by [`has_structure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    /// `a^H * a = I`.
    Unitary,
    /// `a = a^H`.
    Hermitian,
    /// Every frontal slice upper triangular.
    FUpper,
    /// Every frontal slice lower triangular.
    FLower,
    /// Every frontal slice diagonal.
    FDiagonal,
    /// Real and unitary.
    Orthogonal,
}

/// Tolerance-based structure test. Unitarity is measured against
/// `||I||_F`, hermiticity against `||a||_F`, triangular shapes against the
/// largest entry; all with `tol.predicate`.
pub fn has_structure(a: &Tensor3, which: Structure, tol: &Tolerances) -> Result<bool> {
    let [n, _, p] = a.shape();
    a.require_f_square("structure predicate")?;
    let t = tol.predicate;
    let entry_tol = t * a.max_abs();
    Ok(match which {
        Structure::Unitary => unitary_deviation(a)? <= t * ((n * p) as f64).sqrt(),
        Structure::Orthogonal => a.max_imag() <= entry_tol && unitary_deviation(a)? <= t * ((n * p) as f64).sqrt(),
        Structure::Hermitian => fro_norm(&(a - &conj_transpose(a))) <= t * fro_norm(a),
        Structure::FUpper => a.slices().iter().all(|s| s.is_upper_triangular(entry_tol)),
        Structure::FLower => a.slices().iter().all(|s| s.is_lower_triangular(entry_tol)),
        Structure::FDiagonal => a.slices().iter().all(|s| s.is_diagonal(entry_tol)),
    })
}

fn unitary_deviation(a: &Tensor3) -> Result<f64> {
    let [n, _, p] = a.shape();
    let g = tprod(&conj_transpose(a), a)?;
    Ok(fro_norm(&(&g - &identity_tensor(n, p))))
}

/// `sqrt(sum_i ||D_i||_F^2)`; equals [`fro_norm`] of the tensor.
pub(crate) fn blocks_norm(blocks: &[DenseMatrix]) -> f64 {
    blocks.iter().map(|b| b.fro_norm().powi(2)).sum::<f64>().sqrt()
}

/// Spectral norms of every block.
pub(crate) fn spectral_norms(blocks: &FourierBlocks) -> Vec<f64> {
    crate::map_indexed(blocks.p(), |i| svd(blocks.block(i)).sigma.first().copied().unwrap_or(0.0))
}
