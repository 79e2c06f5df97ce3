//! T-eigenvalues, the T-Jordan canonical form, diagonalizability,
//! nilpotency and simultaneous diagonalization of commuting families.
//!
//! Everything is computed one Fourier block at a time. Jordan structure in
//! floating point is only meaningful when eigenvalue clusters are well
//! separated; outside that regime the functions return
//! [`TensorError::IllConditioned`] instead of a guess.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::algebra::{block_inverse, commutator, tprod3};
use crate::dense::schur::schur;
use crate::dense::DenseMatrix;
use crate::error::{shape_err, Result, TensorError};
use crate::transform::{from_blocks, to_blocks, FourierBlocks};
use crate::{fro_norm, Tensor3, Tolerances, C64};

pub(crate) mod block;
pub(crate) mod cluster;

use block::{block_jordan, block_scales, BlockJordan};
use cluster::lex;

/// One Jordan block `J_size(eigenvalue)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: C64,
    pub size: usize,
}

/// T-eigenvalues grouped by Fourier block, each group sorted by (re, im).
#[derive(Debug, Clone, PartialEq)]
pub struct TEigenvalues {
    values: Vec<Vec<C64>>,
}

impl TEigenvalues {
    pub fn per_block(&self) -> &[Vec<C64>] {
        &self.values
    }

    pub fn block(&self, i: usize) -> &[C64] {
        &self.values[i]
    }

    /// All `n p` values, block by block.
    pub fn all(&self) -> Vec<C64> {
        self.values.iter().flatten().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.values.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest modulus over all blocks.
    pub fn max_modulus(&self) -> f64 {
        self.values.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn t_eigenvalues(a: &Tensor3) -> Result<TEigenvalues> {
    let blocks = to_blocks(a)?;
    block_eigenvalues(&blocks)
}

pub(crate) fn block_eigenvalues(blocks: &FourierBlocks) -> Result<TEigenvalues> {
    let per: Result<Vec<Vec<C64>>> = crate::map_indexed(blocks.p(), |i| {
        let mut ev = schur(blocks.block(i))?.eigenvalues();
        ev.sort_by(lex);
        Ok(ev)
    })
    .into_iter()
    .collect();
    Ok(TEigenvalues { values: per? })
}

/// T-Jordan factorization `a = P^{-1} * J * P`.
#[derive(Debug, Clone)]
pub struct TJordan {
    pub p_tensor: Tensor3,
    /// `P^{-1}`, kept so that reconstruction needs no further inversion.
    pub p_inv: Tensor3,
    pub j_tensor: Tensor3,
    /// Jordan blocks of every Fourier block of `J`, in diagonal order.
    pub block_structure: Vec<Vec<JordanBlock>>,
}

impl TJordan {
    /// `P^{-1} * J * P`.
    pub fn reconstruct(&self) -> Tensor3 {
        tprod3(&self.p_inv, &self.j_tensor, &self.p_tensor).expect("factors are conformable")
    }
}

/// Builds `P^{-1} * J * P` where the Fourier blocks of `J` are the Jordan
/// matrices described by `structure` (one list per block).
pub fn jordan_synthesize(structure: &[Vec<JordanBlock>], p_tensor: &Tensor3, tol: &Tolerances) -> Result<Tensor3> {
    let n = p_tensor.require_f_square("jordan_synthesize")?;
    let p = p_tensor.n_slices();
    if structure.len() != p {
        return Err(shape_err(format!("structure lists {} blocks, transform has {p}", structure.len())));
    }
    for (i, blocks) in structure.iter().enumerate() {
        let total: usize = blocks.iter().map(|b| b.size).sum();
        if total != n || blocks.iter().any(|b| b.size == 0) {
            return Err(shape_err(format!("Jordan blocks of Fourier block {} sum to {total}, expected {n}", i + 1)));
        }
    }
    let j = FourierBlocks::new(structure.iter().map(|b| block::jordan_matrix(b)).collect())?;
    let pb = to_blocks(p_tensor)?;
    let top = pb.max_block_norm();
    let pinv = pb.try_map(|i, d| block_inverse(d, i, top, tol))?;
    tprod3(&from_blocks(&pinv), &from_blocks(&j), p_tensor)
}

fn block_jordans(blocks: &FourierBlocks, tol: &Tolerances) -> Result<Vec<BlockJordan>> {
    let scales = block_scales(blocks.blocks(), tol);
    crate::map_indexed(blocks.p(), |i| block_jordan(blocks.block(i), &scales[i], tol)).into_iter().collect()
}

pub fn jordan_factorize(a: &Tensor3, tol: &Tolerances) -> Result<TJordan> {
    let blocks = to_blocks(a)?;
    let jordans = block_jordans(&blocks, tol)?;
    let p = FourierBlocks::new(jordans.iter().map(|b| b.s_inv.clone()).collect())?;
    let p_inv = FourierBlocks::new(jordans.iter().map(|b| b.s.clone()).collect())?;
    let j = FourierBlocks::new(jordans.iter().map(|b| b.j.clone()).collect())?;
    Ok(TJordan {
        p_tensor: from_blocks(&p),
        p_inv: from_blocks(&p_inv),
        j_tensor: from_blocks(&j),
        block_structure: jordans.into_iter().map(|b| b.blocks).collect(),
    })
}

/// Jordan structure of every Fourier block, without assembling tensors.
pub fn jordan_structure(a: &Tensor3, tol: &Tolerances) -> Result<Vec<Vec<JordanBlock>>> {
    let blocks = to_blocks(a)?;
    Ok(block_jordans(&blocks, tol)?.into_iter().map(|b| b.blocks).collect())
}

pub fn is_f_diagonalizable(a: &Tensor3, tol: &Tolerances) -> Result<bool> {
    Ok(jordan_structure(a, tol)?.iter().flatten().all(|b| b.size == 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nilpotency {
    NotNilpotent,
    /// Nilpotent with the given index `s` (`a^s = 0`, `a^{s-1} != 0`).
    Nilpotent(usize),
}

/// Nilpotency test: the index is the smallest `s <= n` with
/// `||a^s|| <= tol.nil * ||a||^s`.
pub fn nilpotency(a: &Tensor3, tol: &Tolerances) -> Result<Nilpotency> {
    nilpotency_scaled(a, fro_norm(a), tol)
}

/// [`nilpotency`] with powers measured against `scale^s` instead of
/// `||a||^s`; useful when `a` is itself a small remainder of a larger tensor.
pub fn nilpotency_scaled(a: &Tensor3, scale: f64, tol: &Tolerances) -> Result<Nilpotency> {
    let n = a.require_f_square("nilpotency")?;
    let blocks = to_blocks(a)?;
    let norm = scale;
    let mut pw: Vec<DenseMatrix> = blocks.blocks().to_vec();
    for s in 1..=n {
        let ps = crate::algebra::blocks_norm(&pw);
        if ps <= tol.nil * norm.powi(s as i32) {
            return Ok(Nilpotency::Nilpotent(s));
        }
        pw = pw.iter().zip(blocks.blocks()).map(|(x, d)| x.matmul(d)).collect();
    }
    Ok(Nilpotency::NotNilpotent)
}

/// Common F-diagonalization of a commuting family.
#[derive(Debug, Clone)]
pub struct SimultaneousDiagonalization {
    pub p_tensor: Tensor3,
    pub p_inv: Tensor3,
    /// F-diagonal `D_k` with `family[k] = P^{-1} * D_k * P`.
    pub diagonals: Vec<Tensor3>,
}

pub fn simultaneous_diagonalize(family: &[Tensor3], tol: &Tolerances) -> Result<SimultaneousDiagonalization> {
    let first = family.first().ok_or_else(|| shape_err("empty family"))?;
    let n = first.require_f_square("simultaneous_diagonalize")?;
    if family.iter().any(|t| t.shape() != first.shape()) {
        return Err(shape_err("family members differ in shape"));
    }
    for (x, a) in family.iter().enumerate() {
        for b in &family[x + 1..] {
            let c = fro_norm(&commutator(a, b)?);
            if c > tol.predicate * fro_norm(a) * fro_norm(b) {
                return Err(TensorError::NotCommuting { norm: c });
            }
        }
    }
    let member_blocks: Vec<FourierBlocks> = family.iter().map(to_blocks).collect::<Result<_>>()?;
    for mb in &member_blocks {
        for (i, bj) in block_jordans(mb, tol)?.iter().enumerate() {
            if bj.blocks.iter().any(|b| b.size > 1) {
                return Err(TensorError::NotDiagonalizable { block: i + 1 });
            }
        }
    }
    let p = first.n_slices();
    let bases: Vec<DenseMatrix> = crate::map_indexed(p, |i| {
        let mats: Vec<&DenseMatrix> = member_blocks.iter().map(|m| m.block(i)).collect();
        common_eigenbasis(&mats, n, tol)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let inv: Vec<DenseMatrix> =
        bases.iter().enumerate().map(|(i, v)| block_inverse(v, i, 0.0, tol)).collect::<Result<_>>()?;
    let mut diagonals = Vec::with_capacity(family.len());
    for mb in &member_blocks {
        let diag: Vec<DenseMatrix> = (0..p)
            .map(|i| {
                let m = inv[i].matmul(mb.block(i)).matmul(&bases[i]);
                DenseMatrix::diagonal(&m.diag())
            })
            .collect();
        for (i, dg) in diag.iter().enumerate() {
            let back = bases[i].matmul(dg).matmul(&inv[i]);
            let err = (&back - mb.block(i)).fro_norm();
            if err > tol.jordan * mb.block(i).fro_norm().max(1e3 * f64::EPSILON * mb.max_block_norm()) {
                return Err(TensorError::IllConditioned(format!(
                    "common eigenbasis of Fourier block {} leaves residual {err:.3e}",
                    i + 1
                )));
            }
        }
        diagonals.push(from_blocks(&FourierBlocks::new(diag)?));
    }
    Ok(SimultaneousDiagonalization {
        p_tensor: from_blocks(&FourierBlocks::new(inv)?),
        p_inv: from_blocks(&FourierBlocks::new(bases)?),
        diagonals,
    })
}

/// Columns spanning joint eigenspaces, refined member by member: each
/// current invariant subspace is split by the eigenspaces of the next
/// member restricted to it.
fn common_eigenbasis(mats: &[&DenseMatrix], n: usize, tol: &Tolerances) -> Result<DenseMatrix> {
    let mut spaces = alloc::vec![DenseMatrix::identity(n)];
    for m in mats {
        let norm = m.fro_norm();
        let bs = block::BlockScale { norm, floor: 1e3 * f64::EPSILON * norm, negligible: norm == 0.0 };
        let mut next = Vec::new();
        for v in &spaces {
            if v.cols() == 1 {
                next.push(v.clone());
                continue;
            }
            let restricted = v.adjoint().matmul(m).matmul(v);
            let bj = block_jordan(&restricted, &bs, tol)?;
            let mut start = 0;
            while start < bj.blocks.len() {
                let lambda = bj.blocks[start].eigenvalue;
                let mut end = start + 1;
                while end < bj.blocks.len() && bj.blocks[end].eigenvalue == lambda {
                    end += 1;
                }
                let cols = v.matmul(&bj.s.select_columns(&(start..end).collect::<Vec<_>>()));
                let (q, _) = crate::dense::qr::qr(&cols);
                next.push(q.select_columns(&(0..end - start).collect::<Vec<_>>()));
                start = end;
            }
        }
        spaces = next;
    }
    Ok(spaces.iter().skip(1).fold(spaces[0].clone(), |acc, s| acc.hcat(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tpow;
    use crate::{identity_tensor, ZERO};

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn tube(values: &[f64]) -> Tensor3 {
        Tensor3::from_real(1, 1, values.len(), values).unwrap()
    }

    fn well_conditioned(n: usize, p: usize) -> Tensor3 {
        let mut t = identity_tensor(n, p).scale(r(2.0));
        let noise = Tensor3::new(
            n,
            n,
            p,
            (0..n * n * p).map(|k| C64::new((k as f64 * 0.61).sin() * 0.3, (k as f64 * 1.7).cos() * 0.2)).collect(),
        )
        .unwrap();
        t = &t + &noise;
        t
    }

    fn nil2() -> Tensor3 {
        Tensor3::from_real(2, 2, 1, &[0.0, 1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn eigenvalue_examples() {
        let ev = t_eigenvalues(&identity_tensor(2, 3)).unwrap();
        assert_eq!(ev.len(), 6);
        assert!(ev.all().iter().all(|z| (z - r(1.0)).norm() < 1e-15));
        let ev = t_eigenvalues(&tube(&[1.0, 2.0])).unwrap();
        assert!((ev.block(0)[0] - r(3.0)).norm() < 1e-15 && (ev.block(1)[0] - r(-1.0)).norm() < 1e-15);
        let ev = t_eigenvalues(&tube(&[1.0, -1.0])).unwrap();
        assert!(ev.block(0)[0].norm() < 1e-15 && (ev.block(1)[0] - r(2.0)).norm() < 1e-15);
    }

    #[test]
    fn synthesis_examples() {
        let tol = Tolerances::DEFAULT;
        let ones = alloc::vec![alloc::vec![JordanBlock { eigenvalue: r(1.0), size: 1 }; 2]; 3];
        let a = jordan_synthesize(&ones, &identity_tensor(2, 3), &tol).unwrap();
        assert!(fro_norm(&(&a - &identity_tensor(2, 3))) < 1e-14);
        let nil = alloc::vec![alloc::vec![JordanBlock { eigenvalue: ZERO, size: 2 }]];
        let a = jordan_synthesize(&nil, &identity_tensor(2, 1), &tol).unwrap();
        assert!(fro_norm(&(&a - &nil2())) < 1e-15);
        assert!(matches!(
            jordan_synthesize(&nil, &Tensor3::zeros(2, 2, 1), &tol),
            Err(TensorError::Singular { block: 1 })
        ));
    }

    #[test]
    fn factorization_round_trip() {
        let tol = Tolerances::DEFAULT;
        let structure = alloc::vec![
            alloc::vec![JordanBlock { eigenvalue: r(2.0), size: 2 }, JordanBlock { eigenvalue: r(5.0), size: 1 }],
            alloc::vec![JordanBlock { eigenvalue: ZERO, size: 3 }],
            alloc::vec![
                JordanBlock { eigenvalue: C64::new(0.0, 1.0), size: 1 },
                JordanBlock { eigenvalue: r(-1.0), size: 1 },
                JordanBlock { eigenvalue: r(-1.0), size: 1 },
            ],
        ];
        let p = well_conditioned(3, 3);
        let a = jordan_synthesize(&structure, &p, &tol).unwrap();
        let tj = jordan_factorize(&a, &tol).unwrap();
        assert!(fro_norm(&(&tj.reconstruct() - &a)) < 1e-8 * fro_norm(&a));
        for (got, want) in tj.block_structure.iter().zip(&structure) {
            let key = |b: &JordanBlock| {
                ((b.eigenvalue.re * 1e4).round() as i64, (b.eigenvalue.im * 1e4).round() as i64, b.size)
            };
            let mut g: Vec<_> = got.iter().map(key).collect();
            let mut w: Vec<_> = want.iter().map(key).collect();
            g.sort();
            w.sort();
            assert_eq!(g, w);
        }
        assert!(tj.j_tensor.slices().iter().all(|s| s.is_upper_bidiagonal(1e-12)));
        assert!(!is_f_diagonalizable(&a, &tol).unwrap());
    }

    #[test]
    fn diagonalizability_examples() {
        let tol = Tolerances::DEFAULT;
        assert!(is_f_diagonalizable(&identity_tensor(3, 2), &tol).unwrap());
        assert!(!is_f_diagonalizable(&nil2(), &tol).unwrap());
        assert!(is_f_diagonalizable(&well_conditioned(3, 4), &tol).unwrap());
    }

    #[test]
    fn nilpotency_examples() {
        let tol = Tolerances::DEFAULT;
        assert_eq!(nilpotency(&Tensor3::zeros(2, 2, 3), &tol).unwrap(), Nilpotency::Nilpotent(1));
        assert_eq!(nilpotency(&nil2(), &tol).unwrap(), Nilpotency::Nilpotent(2));
        assert_eq!(nilpotency(&tube(&[1.0, -1.0]), &tol).unwrap(), Nilpotency::NotNilpotent);
    }

    #[test]
    fn simultaneous_examples() {
        let tol = Tolerances::DEFAULT;
        let a = well_conditioned(3, 2);
        let a2 = tpow(&a, 2).unwrap();
        let sd = simultaneous_diagonalize(&[a.clone(), a2.clone()], &tol).unwrap();
        for (orig, d) in [a, a2].iter().zip(&sd.diagonals) {
            let back = tprod3(&sd.p_inv, d, &sd.p_tensor).unwrap();
            assert!(fro_norm(&(&back - orig)) < 1e-9 * fro_norm(orig));
            assert!(d.slices().iter().all(|s| s.is_diagonal(1e-12 * d.max_abs())));
        }
        let b = well_conditioned(2, 2);
        let c = Tensor3::from_real(2, 2, 2, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(simultaneous_diagonalize(&[b, c], &tol), Err(TensorError::NotCommuting { .. })));
        let id = identity_tensor(2, 2);
        assert!(matches!(
            simultaneous_diagonalize(&[id, Tensor3::from_real(2, 2, 1, &[0.0, 1.0, 0.0, 0.0]).unwrap()], &tol),
            Err(TensorError::Shape(_))
        ));
    }
}
