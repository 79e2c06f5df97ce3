//! Generalized inverses: Moore-Penrose, group and Drazin, with T-rank,
//! T-index, the core-nilpotent decomposition and the resolvent limits.
//!
//! Rank decisions for a single block compare singular values with
//! `tol.rank * max_j sigma_max(D_j)`, one scale for the whole tensor, so
//! that a Fourier block at rounding level never counts as full rank.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::algebra::{tpow, tprod, tprod3};
use crate::dense::lu::Lu;
use crate::dense::svd::svd;
use crate::dense::DenseMatrix;
use crate::error::{Result, TensorError};
use crate::spectral::block::{block_scales, core_split, CoreSplit};
use crate::transform::{from_blocks, to_blocks, to_blocks_rect, FourierBlocks};
use crate::{conj_transpose, fro_norm, identity_tensor, Tensor3, Tolerances, C64};

fn top_sigma(blocks: &FourierBlocks) -> f64 {
    crate::algebra::spectral_norms(blocks).into_iter().fold(0.0, f64::max)
}

/// Numerical rank of `bcirc(a)`: the sum of the block ranks.
pub fn t_rank(a: &Tensor3, tol: &Tolerances) -> usize {
    let blocks = to_blocks_rect(a);
    let thr = tol.rank * top_sigma(&blocks);
    crate::map_indexed(blocks.p(), |i| svd(blocks.block(i)).rank(thr)).into_iter().sum()
}

/// Singular values of `d^k` below this are treated as zero. `d` itself is
/// judged against `tol.rank * top`, with `top` the largest block norm, and
/// higher powers against `tol.rank * ||d^k||`. The floor
/// `1e3 * eps * top * sum_a ||d^a|| ||d^(k-1-a)||` covers the rounding error
/// a product picks up, so the power of a nilpotent block is zero.
/// `norms[j]` is `||d^j||_2` for `j < k`.
fn power_threshold(norms: &[f64], k: usize, big: f64, top: f64, tol: &Tolerances) -> f64 {
    let spread: f64 = (0..k).map(|a| norms[a] * norms[k - 1 - a]).sum();
    let floor = 1e3 * f64::EPSILON * top * spread;
    (tol.rank * if k == 1 { top } else { big }).max(floor)
}

/// Spectral norms of `d^j` for `j = 0..count`.
fn power_norms(d: &DenseMatrix, count: usize) -> Vec<f64> {
    let mut norms = alloc::vec![1.0];
    let mut pw = DenseMatrix::identity(d.rows());
    for _ in 1..count {
        pw = pw.matmul(d);
        norms.push(svd(&pw).sigma.first().copied().unwrap_or(0.0));
    }
    norms
}

/// `rank(d^k)` for `k = 0, 1, ...` until two consecutive ranks agree.
fn power_ranks(d: &DenseMatrix, top: f64, tol: &Tolerances) -> Vec<usize> {
    let n = d.rows();
    let mut ranks = alloc::vec![n];
    let mut norms = alloc::vec![1.0];
    let mut pw = DenseMatrix::identity(n);
    for k in 1..=n {
        pw = pw.matmul(d);
        let s = svd(&pw);
        let big = s.sigma.first().copied().unwrap_or(0.0);
        let r = s.rank(power_threshold(&norms, k, big, top, tol));
        norms.push(big);
        let stable = r == ranks[k - 1];
        ranks.push(r);
        if stable {
            break;
        }
    }
    ranks
}

fn index_of(ranks: &[usize]) -> usize {
    let m = ranks.len();
    if ranks[m - 1] == ranks[m - 2] {
        m - 2
    } else {
        m - 1
    }
}

fn block_indices(blocks: &FourierBlocks, tol: &Tolerances) -> Vec<usize> {
    let top = top_sigma(blocks);
    crate::map_indexed(blocks.p(), |i| index_of(&power_ranks(blocks.block(i), top, tol)))
}

/// T-index: the largest index over the Fourier blocks; zero iff `a` is
/// invertible.
pub fn t_index(a: &Tensor3, tol: &Tolerances) -> Result<usize> {
    let blocks = to_blocks(a)?;
    Ok(block_indices(&blocks, tol).into_iter().max().unwrap_or(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GinvKind {
    MoorePenrose,
    Group,
    Drazin,
}

/// A generalized inverse with the relative residuals of its defining
/// equations.
#[derive(Debug, Clone)]
pub struct GinvReport {
    pub inverse: Tensor3,
    pub kind: GinvKind,
    /// T-index of the input (group and Drazin inverses only).
    pub t_index: Option<usize>,
    /// Residual `||lhs - rhs||_F / ||rhs||_F` per equation (absolute when the
    /// right-hand side vanishes).
    pub residuals: BTreeMap<&'static str, f64>,
}

impl GinvReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }
}

fn rel(lhs: &Tensor3, rhs: &Tensor3) -> f64 {
    let d = fro_norm(&(lhs - rhs));
    let s = fro_norm(rhs);
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

fn mp_blocks(a: &Tensor3, tol: &Tolerances) -> FourierBlocks {
    let blocks = to_blocks_rect(a);
    let thr = tol.rank * top_sigma(&blocks);
    blocks.map(|_, d| svd(d).pinv(thr))
}

/// T-Moore-Penrose inverse by blockwise SVD, truncated at `tol.rank`.
pub fn t_moore_penrose(a: &Tensor3, tol: &Tolerances) -> Result<GinvReport> {
    let x = from_blocks(&mp_blocks(a, tol));
    let ax = tprod(a, &x)?;
    let xa = tprod(&x, a)?;
    let mut residuals = BTreeMap::new();
    residuals.insert("axa", rel(&tprod(&ax, a)?, a));
    residuals.insert("xax", rel(&tprod(&xa, &x)?, &x));
    residuals.insert("ax_hermitian", rel(&conj_transpose(&ax), &ax));
    residuals.insert("xa_hermitian", rel(&conj_transpose(&xa), &xa));
    Ok(GinvReport { inverse: x, kind: GinvKind::MoorePenrose, t_index: None, residuals })
}

fn drazin_residuals(a: &Tensor3, x: &Tensor3, k: usize) -> Result<BTreeMap<&'static str, f64>> {
    let ak = tpow(a, k)?;
    let mut residuals = BTreeMap::new();
    // For a nilpotent input X = 0 and A^k vanishes up to rounding, which is
    // then measured against ||A||^k.
    let akxa = if fro_norm(x) == 0.0 {
        let s = fro_norm(a).powi(k as i32);
        if s > 0.0 {
            fro_norm(&ak) / s
        } else {
            0.0
        }
    } else {
        rel(&tprod3(&ak, x, a)?, &ak)
    };
    residuals.insert("akxa", akxa);
    residuals.insert("xax", rel(&tprod3(x, a, x)?, x));
    let ax = tprod(a, x)?;
    let comm = fro_norm(&(&ax - &tprod(x, a)?));
    let scale = fro_norm(a) * fro_norm(x);
    residuals.insert("commute", if scale > 0.0 { comm / scale } else { comm });
    Ok(residuals)
}

/// Per-block zero/nonzero spectral split, checked against the rank-based
/// block indices: the zero part must have dimension `n - rank(D^k)`.
fn splits(a: &Tensor3, tol: &Tolerances) -> Result<(Vec<CoreSplit>, usize)> {
    let blocks = to_blocks(a)?;
    let scales = block_scales(blocks.blocks(), tol);
    let top = top_sigma(&blocks);
    let parts: Vec<(CoreSplit, usize)> = crate::map_indexed(blocks.p(), |i| {
        let cs = core_split(blocks.block(i), &scales[i], tol)?;
        let n = blocks.n();
        let ranks = power_ranks(blocks.block(i), top, tol);
        let k = index_of(&ranks);
        let rank = ranks[k];
        if cs.zero_dim != n - rank {
            return Err(TensorError::IllConditioned(format!(
                "Fourier block {}: spectral split finds {} zero eigenvalues, rank test {}",
                i + 1,
                cs.zero_dim,
                n - rank
            )));
        }
        Ok((cs, k))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let k = parts.iter().map(|p| p.1).max().unwrap_or(0);
    Ok((parts.into_iter().map(|p| p.0).collect(), k))
}

fn gather(parts: &[CoreSplit], pick: impl Fn(&CoreSplit) -> &DenseMatrix) -> Tensor3 {
    from_blocks(&FourierBlocks::new_unchecked(parts.iter().map(|c| pick(c).clone()).collect()))
}

/// `a^k (a^{2k+1})^+ a^k` blockwise, an SVD-based route to the Drazin
/// inverse that does not use the Schur split.
pub fn drazin_by_formula(a: &Tensor3, k: usize, tol: &Tolerances) -> Result<Tensor3> {
    let blocks = to_blocks(a)?;
    let top = top_sigma(&blocks);
    let m = 2 * k + 1;
    Ok(from_blocks(&blocks.map(|_, d| {
        let norms = power_norms(d, m);
        let high = d.pow(m);
        let s = svd(&high);
        let big = s.sigma.first().copied().unwrap_or(0.0);
        let dk = d.pow(k);
        dk.matmul(&s.pinv(power_threshold(&norms, m, big, top, tol))).matmul(&dk)
    })))
}

/// T-Drazin inverse from the spectral split of every Fourier block.
pub fn t_drazin(a: &Tensor3, tol: &Tolerances) -> Result<GinvReport> {
    t_drazin_with(a, tol, false)
}

/// Like [`t_drazin`]; with `cross_check` the result is compared with
/// [`drazin_by_formula`] and the relative gap is reported as `"formula"`.
pub fn t_drazin_with(a: &Tensor3, tol: &Tolerances, cross_check: bool) -> Result<GinvReport> {
    let (parts, k) = splits(a, tol)?;
    let x = gather(&parts, |c| &c.drazin);
    let mut residuals = drazin_residuals(a, &x, k)?;
    if cross_check {
        residuals.insert("formula", rel(&drazin_by_formula(a, k, tol)?, &x));
    }
    Ok(GinvReport { inverse: x, kind: GinvKind::Drazin, t_index: Some(k), residuals })
}

/// T-group inverse; exists only for T-index at most one.
pub fn t_group_inverse(a: &Tensor3, tol: &Tolerances) -> Result<GinvReport> {
    let k = t_index(a, tol)?;
    if k > 1 {
        return Err(TensorError::TIndex { index: k, reason: "a group inverse needs T-index at most 1" });
    }
    let (parts, _) = splits(a, tol)?;
    let x = gather(&parts, |c| &c.drazin);
    let mut residuals = BTreeMap::new();
    residuals.insert("axa", rel(&tprod3(a, &x, a)?, a));
    let d = drazin_residuals(a, &x, k)?;
    residuals.insert("xax", d["xax"]);
    residuals.insert("commute", d["commute"]);
    Ok(GinvReport { inverse: x, kind: GinvKind::Group, t_index: Some(k), residuals })
}

/// Range of every Fourier block equals the range of its adjoint, compared
/// through the orthogonal projectors.
pub fn is_range_hermitian(a: &Tensor3, tol: &Tolerances) -> Result<bool> {
    let blocks = to_blocks(a)?;
    let thr = tol.rank * top_sigma(&blocks);
    let n = blocks.n();
    let gaps = crate::map_indexed(blocks.p(), |i| {
        let s = svd(blocks.block(i));
        let r = s.rank(thr);
        let cols: Vec<usize> = (0..r).collect();
        let u = s.u.select_columns(&cols);
        let v = s.v.select_columns(&cols);
        (&u.matmul(&u.adjoint()) - &v.matmul(&v.adjoint())).fro_norm()
    });
    Ok(gaps.into_iter().all(|g| g <= tol.predicate * (n as f64).sqrt()))
}

/// `a = core + nilpotent` with `core = a^2 * a^D`.
#[derive(Debug, Clone)]
pub struct CoreNilpotent {
    pub core: Tensor3,
    pub nilpotent: Tensor3,
    pub t_index: usize,
}

/// Core-nilpotent decomposition; the nilpotent part is `a - a^2 * a^D`.
pub fn core_nilpotent(a: &Tensor3, tol: &Tolerances) -> Result<CoreNilpotent> {
    let dr = t_drazin(a, tol)?;
    let core = tprod3(a, a, &dr.inverse)?;
    let nilpotent = a - &core;
    Ok(CoreNilpotent { core, nilpotent, t_index: dr.t_index.unwrap_or(0) })
}

/// The same decomposition read directly off the spectral split of every
/// block (invertible part and nilpotent part of the Jordan form).
pub fn core_nilpotent_blockwise(a: &Tensor3, tol: &Tolerances) -> Result<CoreNilpotent> {
    let (parts, k) = splits(a, tol)?;
    Ok(CoreNilpotent { core: gather(&parts, |c| &c.core), nilpotent: gather(&parts, |c| &c.nilpotent), t_index: k })
}

pub const DEFAULT_DRAZIN_Z: [f64; 4] = [1e-2, 1e-4, 1e-6, 1e-8];

/// Resolvent approximations `(a^{l+1} + z I)^{-1} * a^l` of the Drazin
/// inverse and their relative distance to [`t_drazin`].
#[derive(Debug, Clone)]
pub struct DrazinLimit {
    pub z: Vec<f64>,
    pub estimates: Vec<Tensor3>,
    pub errors: Vec<f64>,
    pub drazin: Tensor3,
}

impl DrazinLimit {
    /// Errors decrease strictly and the last one is at most `1e-5`.
    pub fn converged(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0]) && self.errors.last().is_some_and(|&e| e <= 1e-5)
    }

    pub fn limit_estimate(&self) -> &Tensor3 {
        self.estimates.last().expect("at least one z")
    }
}

pub fn drazin_limit(a: &Tensor3, l: usize, z_sequence: &[f64], tol: &Tolerances) -> Result<DrazinLimit> {
    if z_sequence.is_empty() || z_sequence.iter().any(|&z| !(z > 0.0)) {
        return Err(crate::error::shape_err("z sequence must be nonempty and positive"));
    }
    let blocks = to_blocks(a)?;
    let drazin = t_drazin(a, tol)?.inverse;
    let pl = blocks.map(|_, d| d.pow(l));
    let pl1 = blocks.map(|i, d| pl.block(i).matmul(d));
    let mut estimates = Vec::with_capacity(z_sequence.len());
    let mut errors = Vec::with_capacity(z_sequence.len());
    for &z in z_sequence {
        let zc = C64::new(z, 0.0);
        // `a^(l+1) + zI` is close to singular on purpose; only an exactly
        // zero pivot is an error.
        let est = pl1.try_map(|i, m| {
            let lu = Lu::pivoted(&m.add_identity(zc));
            if lu.min_pivot() == 0.0 {
                return Err(TensorError::Singular { block: i + 1 });
            }
            Ok(lu.solve(pl.block(i)))
        })?;
        let est = from_blocks(&est);
        errors.push(rel(&est, &drazin));
        estimates.push(est);
    }
    Ok(DrazinLimit { z: z_sequence.to_vec(), estimates, errors, drazin })
}

/// `z_t = 0.2 * 2^{-t}`, `t = 0..8`: small enough to expose the behaviour at
/// zero, large enough that `(a + zI)^{-1}` stays accurate for indices up to
/// four.
pub fn default_nilpotent_z() -> Vec<f64> {
    (0..9).map(|t| 0.2 * 0.5f64.powi(t)).collect()
}

#[derive(Debug, Clone)]
pub enum LimitOutcome {
    Diverges,
    /// Value extrapolated to `z = 0`.
    Converges(Tensor3),
}

#[derive(Debug, Clone)]
pub struct NilpotentLimit {
    pub z: Vec<f64>,
    /// `z^m (a + zI)^{-1} * a^q` at every `z`.
    pub values: Vec<Tensor3>,
    /// `||F(z_t) - F(z_{t+1})||_F`.
    pub differences: Vec<f64>,
    pub outcome: LimitOutcome,
}

/// Tracks `F(z) = z^m (a + zI)^{-1} * a^q` along a decreasing `z_sequence`.
///
/// For nilpotent `a` of index `k`, `F` is a Laurent polynomial in `z` whose
/// negative powers grow geometrically along the sequence. The limit is
/// declared divergent when the successive differences grow from the first
/// to the last step beyond the rounding level of the resolvent; otherwise
/// the value at zero is obtained by polynomial (Neville) extrapolation.
pub fn nilpotent_limit(a: &Tensor3, m: usize, q: usize, z_sequence: &[f64]) -> Result<NilpotentLimit> {
    if z_sequence.len() < 3 || z_sequence.iter().any(|&z| !(z > 0.0)) || z_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(crate::error::shape_err("z sequence needs at least three strictly decreasing positive values"));
    }
    let blocks = to_blocks(a)?;
    let aq = blocks.map(|_, d| d.pow(q));
    let norm = blocks.max_block_norm();
    let mut values = Vec::with_capacity(z_sequence.len());
    let mut noise = 0.0;
    for &z in z_sequence {
        let zc = C64::new(z, 0.0);
        let zm = C64::new(z.powi(m as i32), 0.0);
        let mut inv_norm = 0.0f64;
        let f = blocks.try_map(|i, d| {
            let lu = Lu::pivoted(&d.add_identity(zc));
            if lu.min_pivot() == 0.0 {
                return Err(TensorError::Singular { block: i + 1 });
            }
            Ok(lu.inverse())
        })?;
        for b in f.blocks() {
            inv_norm = inv_norm.max(b.fro_norm());
        }
        noise = 1e4 * f64::EPSILON * z.powi(m as i32) * inv_norm * norm.powi(q as i32).max(1.0);
        let v = f.map(|i, r| r.matmul(aq.block(i)).scale(zm));
        values.push(from_blocks(&v));
    }
    let differences: Vec<f64> = values.windows(2).map(|w| fro_norm(&(&w[1] - &w[0]))).collect();
    let first = differences[0];
    let last = *differences.last().expect("at least two differences");
    let outcome = if last <= first || last <= noise {
        LimitOutcome::Converges(neville_at_zero(z_sequence, &values))
    } else {
        LimitOutcome::Diverges
    };
    Ok(NilpotentLimit { z: z_sequence.to_vec(), values, differences, outcome })
}

/// Value at zero of the interpolating polynomial through `(z_t, v_t)`,
/// entrywise.
fn neville_at_zero(z: &[f64], v: &[Tensor3]) -> Tensor3 {
    let mut p: Vec<Tensor3> = v.to_vec();
    let n = z.len();
    for level in 1..n {
        for i in 0..n - level {
            let (zi, zj) = (z[i], z[i + level]);
            // p_i <- (0 - z_j) p_i / (z_i - z_j) + (z_i - 0) p_{i+1} / (z_i - z_j)
            let wa = C64::new(-zj / (zi - zj), 0.0);
            let wb = C64::new(zi / (zi - zj), 0.0);
            p[i] = &p[i].scale(wa) + &p[i + 1].scale(wb);
        }
    }
    p.swap_remove(0)
}

/// `(-1)^{m+1} (I - a * a^D) * a^{m+q-1}` for `m > 0` and `a^D * a^q` for
/// `m = 0`: the limit of [`nilpotent_limit`] when it exists.
pub fn resolvent_limit_formula(a: &Tensor3, m: usize, q: usize, tol: &Tolerances) -> Result<Tensor3> {
    let x = t_drazin(a, tol)?.inverse;
    if m == 0 {
        return tprod(&x, &tpow(a, q)?);
    }
    let n = a.n_rows();
    let proj = &identity_tensor(n, a.n_slices()) - &tprod(a, &x)?;
    let v = tprod(&proj, &tpow(a, m + q - 1)?)?;
    Ok(if m % 2 == 1 { v } else { v.scale(C64::new(-1.0, 0.0)) })
}
