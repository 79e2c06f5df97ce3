//! Passage between frontal slices and the Fourier blocks that
//! block-diagonalize `bcirc(a)`.
//!
//! Convention: block `i` (zero-based) is `sum_k A^(k) omega^(i k)` with
//! `omega = e^{-2 pi i / p}`. With the unitary DFT matrix `F_p = [omega^(jk)] /
//! sqrt(p)`, `(F_p (x) I) bcirc(a) (F_p^H (x) I) = blockdiag(D_1, ..., D_p)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::dense::DenseMatrix;
use crate::error::{shape_err, Result, TensorError};
use crate::{fft, Tensor3, C64, ZERO};

/// The `p` Fourier-domain blocks of a tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBlocks {
    rows: usize,
    cols: usize,
    blocks: Vec<DenseMatrix>,
}

impl FourierBlocks {
    pub fn new(blocks: Vec<DenseMatrix>) -> Result<Self> {
        let first = blocks.first().ok_or_else(|| shape_err("no Fourier blocks"))?;
        let (rows, cols) = (first.rows(), first.cols());
        if blocks.iter().any(|b| b.rows() != rows || b.cols() != cols) {
            return Err(shape_err("Fourier blocks differ in shape"));
        }
        Ok(Self { rows, cols, blocks })
    }

    pub(crate) fn new_unchecked(blocks: Vec<DenseMatrix>) -> Self {
        let (rows, cols) = (blocks[0].rows(), blocks[0].cols());
        Self { rows, cols, blocks }
    }

    /// Block dimension for F-square tensors (rows of each block otherwise).
    pub fn n(&self) -> usize {
        self.rows
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn p(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[DenseMatrix] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<DenseMatrix> {
        self.blocks
    }

    pub fn block(&self, i: usize) -> &DenseMatrix {
        &self.blocks[i]
    }

    /// Applies `f` to every block (in parallel under the `parallel` feature).
    pub fn map<F>(&self, f: F) -> FourierBlocks
    where
        F: Fn(usize, &DenseMatrix) -> DenseMatrix + Sync + Send,
    {
        FourierBlocks::new_unchecked(crate::map_indexed(self.p(), |i| f(i, &self.blocks[i])))
    }

    /// Fallible per-block map; the first error in block order wins.
    pub fn try_map<F>(&self, f: F) -> Result<FourierBlocks>
    where
        F: Fn(usize, &DenseMatrix) -> Result<DenseMatrix> + Sync + Send,
    {
        let out: Result<Vec<_>> = crate::map_indexed(self.p(), |i| f(i, &self.blocks[i])).into_iter().collect();
        Ok(FourierBlocks::new_unchecked(out?))
    }

    /// `blockdiag(D_1, ..., D_p)` as a dense matrix.
    pub fn block_diagonal(&self) -> DenseMatrix {
        DenseMatrix::block_diag(&self.blocks)
    }

    pub fn max_block_norm(&self) -> f64 {
        self.blocks.iter().map(DenseMatrix::fro_norm).fold(0.0, f64::max)
    }
}

/// Fourier blocks of an F-square tensor.
pub fn to_blocks(a: &Tensor3) -> Result<FourierBlocks> {
    a.require_f_square("to_blocks")?;
    Ok(to_blocks_rect(a))
}

/// Fourier blocks of a tensor of any shape (`m x n` blocks).
pub fn to_blocks_rect(a: &Tensor3) -> FourierBlocks {
    let [m, n, _] = a.shape();
    let len = m * n;
    let slices: Vec<&[C64]> = a.as_slice().chunks(len).collect();
    let out = fft::forward(&slices, len);
    FourierBlocks::new_unchecked(
        out.into_iter().map(|v| DenseMatrix::from_vec(m, n, v).expect("block shape")).collect(),
    )
}

/// Exact inverse of [`to_blocks`] (scaled inverse DFT along tubes).
pub fn from_blocks(b: &FourierBlocks) -> Tensor3 {
    let (m, n, p) = (b.rows, b.cols, b.p());
    let len = m * n;
    let slices: Vec<&[C64]> = b.blocks.iter().map(DenseMatrix::as_slice).collect();
    let out = fft::inverse(&slices, len);
    let data: Vec<C64> = out.into_iter().flatten().collect();
    Tensor3::from_parts_unchecked(m, n, p, data)
}

/// Frontal slice `k` (one-based) recovered directly from the Fourier blocks
/// as the phase-weighted average `(1/p) sum_i omega^{-(k-1)(i-1)} D_i`.
pub fn phase_combine(blocks: &FourierBlocks, k: usize) -> Result<DenseMatrix> {
    let p = blocks.p();
    if k == 0 || k > p {
        return Err(TensorError::SliceIndex { index: k, count: p });
    }
    let mut out = DenseMatrix::zeros(blocks.rows, blocks.cols);
    for (i, d) in blocks.blocks.iter().enumerate() {
        let e = ((k - 1) * i) % p;
        let theta = 2.0 * PI * e as f64 / p as f64;
        let w = C64::new(theta.cos(), theta.sin());
        for (o, &z) in out.as_mut_slice().iter_mut().zip(d.as_slice()) {
            *o += w * z;
        }
    }
    let inv_p = C64::new(1.0 / p as f64, 0.0);
    for o in out.as_mut_slice() {
        *o *= inv_p;
    }
    Ok(out)
}

/// Unitary DFT matrix `F_p` with entries `omega^(jk) / sqrt(p)`.
pub fn dft_matrix(p: usize) -> DenseMatrix {
    let s = 1.0 / (p as f64).sqrt();
    DenseMatrix::from_fn(p, p, |j, k| {
        let theta = -2.0 * PI * ((j * k) % p) as f64 / p as f64;
        C64::new(theta.cos() * s, theta.sin() * s)
    })
}

/// Kronecker product `F (x) I_n`.
pub fn kron_identity(f: &DenseMatrix, n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(f.rows() * n, f.cols() * n, |r, c| if r % n == c % n { f[(r / n, c / n)] } else { ZERO })
}
