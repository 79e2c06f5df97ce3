//! T-characteristic and T-minimal polynomials, kept as root multisets.
//!
//! Both are least common multiples of the per-block polynomials: a root
//! appears with the largest multiplicity it has in any Fourier block. Roots
//! of different blocks are identified when they agree to within
//! `tol.cluster` times the largest block norm; cluster centers are accurate
//! to rounding level even for defective eigenvalues, so this is much tighter
//! than the within-block clustering.

use alloc::format;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Result, TensorError};
use crate::spectral::block::{block_jordan, block_scales, Spectrum};
use crate::spectral::cluster::lex;
use crate::transform::{from_blocks, to_blocks, FourierBlocks};
use crate::{fro_norm, Tensor3, Tolerances, C64, ONE, ZERO};

/// Monic polynomial `prod_r (x - value_r)^{multiplicity_r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootMultiset {
    roots: Vec<(C64, usize)>,
}

impl RootMultiset {
    /// Builds a multiset from explicit roots; equal values are merged and the
    /// result is sorted by (re, im).
    pub fn new(roots: impl IntoIterator<Item = (C64, usize)>) -> Self {
        let mut out: Vec<(C64, usize)> = Vec::new();
        for (z, m) in roots {
            if m == 0 {
                continue;
            }
            match out.iter_mut().find(|(w, _)| *w == z) {
                Some(e) => e.1 += m,
                None => out.push((z, m)),
            }
        }
        out.sort_by(|a, b| lex(&a.0, &b.0));
        Self { roots: out }
    }

    pub fn roots(&self) -> &[(C64, usize)] {
        &self.roots
    }

    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.1).sum()
    }

    /// Multiplicity of the root closest to `z` if it lies within `radius`,
    /// else zero.
    pub fn multiplicity_near(&self, z: C64, radius: f64) -> usize {
        self.roots
            .iter()
            .filter(|(w, _)| (w - z).norm() <= radius)
            .min_by(|a, b| (a.0 - z).norm().total_cmp(&(b.0 - z).norm()))
            .map_or(0, |r| r.1)
    }

    /// Coefficients `c_0, ..., c_deg` (ascending, `c_deg = 1`). Meant for
    /// display; the expansion loses accuracy for clustered roots.
    pub fn expand(&self) -> Vec<C64> {
        let mut c = alloc::vec![ONE];
        for &(z, m) in &self.roots {
            for _ in 0..m {
                let mut next = alloc::vec![ZERO; c.len() + 1];
                for (k, &ck) in c.iter().enumerate() {
                    next[k + 1] += ck;
                    next[k] -= z * ck;
                }
                c = next;
            }
        }
        c
    }
}

/// Per-block lists of (root, multiplicity) merged by taking, for every
/// root, the largest multiplicity across blocks.
fn lcm(per_block: &[Vec<(C64, usize)>], scale: f64, tol: &Tolerances) -> Result<RootMultiset> {
    let limit = tol.cluster * scale;
    let mut merged: Vec<(C64, usize)> = Vec::new();
    for roots in per_block {
        for &(z, m) in roots {
            let near =
                merged.iter().enumerate().map(|(k, (w, _))| (k, (w - z).norm())).min_by(|a, b| a.1.total_cmp(&b.1));
            match near {
                Some((k, d)) if d <= limit => merged[k].1 = merged[k].1.max(m),
                Some((_, d)) if d <= 100.0 * limit => {
                    return Err(TensorError::IllConditioned(format!(
                        "roots {d:.3e} apart cannot be identified or separated (threshold {limit:.3e})"
                    )))
                }
                _ => merged.push((z, m)),
            }
        }
    }
    // Within a block the roots are cluster centers and already distinct.
    Ok(RootMultiset::new(merged))
}

fn clustered_roots(blocks: &FourierBlocks, tol: &Tolerances) -> Result<Vec<Vec<(C64, usize)>>> {
    let scales = block_scales(blocks.blocks(), tol);
    crate::map_indexed(blocks.p(), |i| {
        let spec = Spectrum::new(blocks.block(i), &scales[i], tol)?;
        Ok(spec.clusters.iter().map(|c| (c.center, c.members.len())).collect())
    })
    .into_iter()
    .collect()
}

/// T-characteristic polynomial: LCM of the characteristic polynomials of
/// all Fourier blocks.
pub fn t_char_poly(a: &Tensor3, tol: &Tolerances) -> Result<RootMultiset> {
    let blocks = to_blocks(a)?;
    let per = clustered_roots(&blocks, tol)?;
    lcm(&per, blocks.max_block_norm(), tol)
}

/// T-minimal polynomial: LCM of the minimal polynomials of all Fourier
/// blocks, each read off the block's Jordan structure.
pub fn t_min_poly(a: &Tensor3, tol: &Tolerances) -> Result<RootMultiset> {
    let blocks = to_blocks(a)?;
    let scales = block_scales(blocks.blocks(), tol);
    let per: Vec<Vec<(C64, usize)>> = crate::map_indexed(blocks.p(), |i| {
        let bj = block_jordan(blocks.block(i), &scales[i], tol)?;
        let mut roots: Vec<(C64, usize)> = Vec::new();
        for b in &bj.blocks {
            match roots.iter_mut().find(|(z, _)| *z == b.eigenvalue) {
                Some(r) => r.1 = r.1.max(b.size),
                None => roots.push((b.eigenvalue, b.size)),
            }
        }
        Ok(roots)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    lcm(&per, blocks.max_block_norm(), tol)
}

/// `|| prod_r (a - value_r I)^{m_r} ||_F`.
pub fn poly_residual(ms: &RootMultiset, a: &Tensor3) -> Result<f64> {
    let blocks = to_blocks(a)?;
    let out = blocks.map(|_, d| {
        let n = d.rows();
        let mut acc = DenseMatrix::identity(n);
        for &(z, m) in &ms.roots {
            let shifted = d.add_identity(-z);
            for _ in 0..m {
                acc = acc.matmul(&shifted);
            }
        }
        acc
    });
    Ok(fro_norm(&from_blocks(&out)))
}
