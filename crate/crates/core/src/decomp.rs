//! T-QR, T-LU, T-polar and T-Schur factorizations, computed blockwise.

use alloc::vec::Vec;

use crate::algebra::{has_structure, Structure};
use crate::dense::lu::Lu;
use crate::dense::qr::qr;
use crate::dense::schur::schur;
use crate::dense::svd::svd;
use crate::dense::DenseMatrix;
use crate::error::{Result, TensorError};
use crate::transform::{from_blocks, to_blocks, FourierBlocks};
use crate::{conj_transpose, fro_norm, Tensor3, Tolerances, C64};

fn assemble(blocks: Vec<DenseMatrix>) -> Tensor3 {
    from_blocks(&FourierBlocks::new_unchecked(blocks))
}

fn split<const K: usize>(parts: Vec<[DenseMatrix; K]>) -> [Tensor3; K] {
    let mut cols: [Vec<DenseMatrix>; K] = core::array::from_fn(|_| Vec::with_capacity(parts.len()));
    for p in parts {
        for (c, m) in cols.iter_mut().zip(p) {
            c.push(m);
        }
    }
    cols.map(assemble)
}

/// `a = q * r`, `q` unitary and `r` F-upper triangular. Every block of `r`
/// has a real nonnegative diagonal.
#[derive(Debug, Clone)]
pub struct TQr {
    pub q: Tensor3,
    pub r: Tensor3,
}

pub fn t_qr(a: &Tensor3) -> Result<TQr> {
    let blocks = to_blocks(a)?;
    let parts = crate::map_indexed(blocks.p(), |i| {
        let (q, r) = qr(blocks.block(i));
        [q, r]
    });
    let [q, r] = split(parts);
    Ok(TQr { q, r })
}

/// `perm * a = l * u` (pivoted) or `a = l * u` (unpivoted, `perm` absent).
/// `l` is F-lower triangular with unit diagonal tubes, `u` F-upper.
#[derive(Debug, Clone)]
pub struct TLu {
    pub perm: Option<Tensor3>,
    pub l: Tensor3,
    pub u: Tensor3,
}

/// T-LU factorization. Without pivoting some tensors have none; a pivot of
/// modulus at most `tol.rank * ||D_i||_F` fails with [`TensorError::Pivot`].
pub fn t_lu(a: &Tensor3, pivot: bool, tol: &Tolerances) -> Result<TLu> {
    let blocks = to_blocks(a)?;
    if pivot {
        let parts = crate::map_indexed(blocks.p(), |i| {
            let lu = Lu::pivoted(blocks.block(i));
            [lu.p(), lu.l(), lu.u()]
        });
        let [p, l, u] = split(parts);
        return Ok(TLu { perm: Some(p), l, u });
    }
    let parts: Vec<[DenseMatrix; 2]> = crate::map_indexed(blocks.p(), |i| {
        let d = blocks.block(i);
        Lu::unpivoted(d, tol.rank * d.fro_norm())
            .map(|lu| [lu.l(), lu.u()])
            .map_err(|e| TensorError::Pivot { block: i + 1, step: e.step + 1 })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let [l, u] = split(parts);
    Ok(TLu { perm: None, l, u })
}

/// `a = u * h` with `u` unitary and `h` Hermitian positive semidefinite.
/// For singular `a` the unitary factor is the one given by the SVD.
#[derive(Debug, Clone)]
pub struct TPolar {
    pub u: Tensor3,
    pub h: Tensor3,
}

pub fn t_polar(a: &Tensor3) -> Result<TPolar> {
    let blocks = to_blocks(a)?;
    let parts = crate::map_indexed(blocks.p(), |i| {
        let s = svd(blocks.block(i));
        let sig: Vec<C64> = s.sigma.iter().map(|&x| C64::new(x, 0.0)).collect();
        let va = s.v.adjoint();
        let h = s.v.matmul(&DenseMatrix::diagonal(&sig)).matmul(&va);
        // Hermitian by construction; symmetrize away rounding.
        let h = (&h + &h.adjoint()).scale(C64::new(0.5, 0.0));
        [s.u.matmul(&va), h]
    });
    let [u, h] = split(parts);
    Ok(TPolar { u, h })
}

/// `a = q^H * t * q` with `q` unitary and `t` F-upper triangular; the
/// diagonal of every Fourier block of `t` holds that block's eigenvalues.
#[derive(Debug, Clone)]
pub struct TSchur {
    pub q: Tensor3,
    pub t: Tensor3,
}

pub fn t_schur(a: &Tensor3) -> Result<TSchur> {
    let blocks = to_blocks(a)?;
    let parts: Vec<[DenseMatrix; 2]> = crate::map_indexed(blocks.p(), |i| {
        let s = schur(blocks.block(i))?;
        Ok([s.q.adjoint(), s.t])
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let [q, t] = split(parts);
    Ok(TSchur { q, t })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    Definite,
    Semidefinite,
    Indefinite,
}

/// Classifies a Hermitian tensor by the smallest eigenvalue over all
/// Fourier blocks, compared with `tol.predicate` times the largest block
/// norm.
pub fn is_t_positive_definite(a: &Tensor3, tol: &Tolerances) -> Result<Definiteness> {
    if !has_structure(a, Structure::Hermitian, tol)? {
        return Err(TensorError::NotHermitian { deviation: fro_norm(&(a - &conj_transpose(a))) });
    }
    let blocks = to_blocks(a)?;
    let mins: Vec<f64> = crate::map_indexed(blocks.p(), |i| {
        Ok(schur(blocks.block(i))?.eigenvalues().iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let low = mins.iter().copied().fold(f64::INFINITY, f64::min);
    let t = tol.predicate * blocks.max_block_norm();
    Ok(if low > t {
        Definiteness::Definite
    } else if low >= -t {
        Definiteness::Semidefinite
    } else {
        Definiteness::Indefinite
    })
}
