//! Per-block spectral machinery: clustered Schur forms, block
//! decoupling by Sylvester solves, and Jordan chains of each cluster.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use super::cluster::{cluster_eigenvalues, lex, Cluster};
use super::JordanBlock;
use crate::dense::lu::{upper_triangular_inverse, Lu};
use crate::dense::schur::{schur, Schur};
use crate::dense::svd::{null_space, svd};
use crate::dense::sylvester::solve_triangular_sylvester;
use crate::dense::DenseMatrix;
use crate::error::{Result, TensorError};
use crate::{Tolerances, C64, ONE, ZERO};

/// Largest decoupling coefficient accepted before the split is declared
/// numerically meaningless.
const MAX_COUPLING: f64 = 1e6;

/// How a block sits relative to the rest of the tensor.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BlockScale {
    /// Frobenius norm of the block.
    pub norm: f64,
    /// Floor shared by all blocks, `1e3 * eps * max_j ||D_j||_F`.
    pub floor: f64,
    /// The block is at rounding level compared with the largest block and is
    /// treated as exactly zero.
    pub negligible: bool,
}

pub(crate) fn block_scales(blocks: &[DenseMatrix], tol: &Tolerances) -> Vec<BlockScale> {
    let norms: Vec<f64> = blocks.iter().map(DenseMatrix::fro_norm).collect();
    let top = norms.iter().copied().fold(0.0, f64::max);
    let floor = 1e3 * f64::EPSILON * top;
    norms.into_iter().map(|norm| BlockScale { norm, floor, negligible: norm <= tol.rank * top }).collect()
}

/// Schur form of one block with its eigenvalue clusters.
pub(crate) struct Spectrum {
    pub schur: Schur,
    pub clusters: Vec<Cluster>,
    /// Scale the clusters were measured against.
    pub scale: f64,
}

impl Spectrum {
    pub fn new(d: &DenseMatrix, bs: &BlockScale, tol: &Tolerances) -> Result<Self> {
        let schur = schur(d)?;
        let ev = schur.eigenvalues();
        let n = ev.len();
        let nilpotent = bs.negligible || near_nilpotent(d, bs.norm, tol);
        // Eigenvalues are measured against the spectral radius; the norm of a
        // strongly non-normal block overstates how far apart they sit.
        let radius = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = if nilpotent { bs.norm.max(bs.floor) } else { radius.max(bs.floor) };
        let clusters = if nilpotent {
            alloc::vec![Cluster { center: ZERO, members: (0..n).collect() }]
        } else {
            let mut c = refine(&schur, &ev, &(0..n).collect::<Vec<_>>(), scale, bs.norm, bs.floor, tol);
            c.sort_by(|x, y| lex(&x.center, &y.center));
            c
        };
        Ok(Self { schur, clusters, scale })
    }

    /// Index of the cluster at zero, if any. Clusters whose center is
    /// neither clearly zero nor clearly nonzero make the split unreliable.
    pub fn zero_cluster(&self, tol: &Tolerances) -> Result<Option<usize>> {
        let limit = tol.cluster * self.scale;
        let mut zero = None;
        for (k, c) in self.clusters.iter().enumerate() {
            let r = c.center.norm();
            if r <= limit {
                zero = Some(k);
            } else if r <= 100.0 * limit {
                return Err(TensorError::IllConditioned(format!(
                    "eigenvalue of modulus {r:.3e} is too close to zero (threshold {limit:.3e})"
                )));
            }
        }
        Ok(zero)
    }

    /// Reorders the Schur form so that cluster `order[0]` comes first, then
    /// `order[1]`, and so on, and decouples the diagonal blocks.
    pub fn decouple(self, group_of_cluster: &[usize], groups: usize) -> Result<Decoupled> {
        let n = self.schur.t.rows();
        let mut position_group = alloc::vec![0usize; n];
        for (c, cl) in self.clusters.iter().enumerate() {
            for &m in &cl.members {
                position_group[m] = group_of_cluster[c];
            }
        }
        let mut s = self.schur;
        s.reorder_by_group(&position_group);
        let mut sizes = alloc::vec![0usize; groups];
        for &g in &position_group {
            sizes[g] += 1;
        }
        decouple_sorted(s, sizes)
    }
}

/// Clusters `members` at `scale` and splits again, at a finer scale, every
/// cluster whose shifted diagonal block is not numerically nilpotent.
fn refine(
    schur: &Schur,
    ev: &[C64],
    members: &[usize],
    scale: f64,
    norm: f64,
    floor: f64,
    tol: &Tolerances,
) -> Vec<Cluster> {
    let sub: Vec<C64> = members.iter().map(|&m| ev[m]).collect();
    let mut out = Vec::new();
    for c in cluster_eigenvalues(&sub, scale, tol.cluster) {
        let global: Vec<usize> = c.members.iter().map(|&k| members[k]).collect();
        let finer = scale * 1e-2;
        if global.len() == 1 || shifted_nilpotent(schur, &global, norm, tol) || finer < floor {
            out.push(Cluster { center: c.center, members: global });
        } else {
            out.extend(refine(schur, ev, &global, finer, norm, floor, tol));
        }
    }
    out
}

fn shifted_nilpotent(schur: &Schur, members: &[usize], norm: f64, tol: &Tolerances) -> bool {
    let n = schur.t.rows();
    let groups: Vec<usize> = (0..n).map(|k| usize::from(!members.contains(&k))).collect();
    let mut s = schur.clone();
    s.reorder_by_group(&groups);
    let size = members.len();
    let tc = s.t.submatrix(0, 0, size, size);
    near_nilpotent(&tc.add_identity(-(tc.trace() / size as f64)), norm, tol)
}

/// `||N^s|| <= tol * norm * sum_a ||N^a|| ||N^(s-1-a)||`: the power is at
/// the level a perturbation of size `tol * norm` leaves behind in an
/// exactly nilpotent matrix. Bounding by `||N||^(s-1)` instead would accept
/// strongly non-normal matrices that are far from nilpotent.
fn near_nilpotent(nmat: &DenseMatrix, norm: f64, tol: &Tolerances) -> bool {
    let s = nmat.rows();
    let mut norms = alloc::vec![1.0];
    let mut pw = nmat.clone();
    for _ in 1..s {
        norms.push(pw.fro_norm());
        pw = pw.matmul(nmat);
    }
    let spread: f64 = (0..s).map(|a| norms[a] * norms[s - 1 - a]).sum();
    pw.fro_norm() <= tol.nil * norm * spread
}

/// `D = (q x) diag(T_1, ..., T_g) (q x)^{-1}` with upper-triangular `T_k`
/// taken from the reordered Schur factor.
pub(crate) struct Decoupled {
    pub q: DenseMatrix,
    pub t: DenseMatrix,
    pub x: DenseMatrix,
    pub x_inv: DenseMatrix,
    pub offsets: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl Decoupled {
    pub fn diagonal_block(&self, g: usize) -> DenseMatrix {
        let (o, s) = (self.offsets[g], self.sizes[g]);
        self.t.submatrix(o, o, s, s)
    }

    /// Left factor `q x`.
    pub fn basis(&self) -> DenseMatrix {
        self.q.matmul(&self.x)
    }

    /// Inverse of [`Self::basis`], `x^{-1} q^H`.
    pub fn basis_inv(&self) -> DenseMatrix {
        self.x_inv.matmul(&self.q.adjoint())
    }

    /// `basis * blockdiag(parts) * basis_inv`.
    pub fn assemble(&self, parts: &[DenseMatrix]) -> DenseMatrix {
        self.basis().matmul(&DenseMatrix::block_diag(parts)).matmul(&self.basis_inv())
    }
}

fn decouple_sorted(s: Schur, sizes: Vec<usize>) -> Result<Decoupled> {
    let n = s.t.rows();
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for &sz in &sizes {
        offsets.push(acc);
        acc += sz;
    }
    let mut x = DenseMatrix::identity(n);
    let mut x_inv = DenseMatrix::identity(n);
    for g in 0..sizes.len() {
        let (o, sz) = (offsets[g], sizes[g]);
        let rest = n - o - sz;
        if sz == 0 || rest == 0 {
            continue;
        }
        let t11 = s.t.submatrix(o, o, sz, sz);
        let t22 = s.t.submatrix(o + sz, o + sz, rest, rest);
        let t12 = s.t.submatrix(o, o + sz, sz, rest).scale(-ONE);
        let y = solve_triangular_sylvester(&t11, &t22, &t12)
            .ok_or_else(|| TensorError::IllConditioned("clusters share an eigenvalue in the Schur split".into()))?;
        let ynorm = y.max_abs();
        if !(ynorm <= MAX_COUPLING) {
            return Err(TensorError::IllConditioned(format!(
                "block decoupling coefficient {ynorm:.3e} exceeds {MAX_COUPLING:.0e}"
            )));
        }
        // X <- X M and X^{-1} <- M^{-1} X^{-1} with M = [[I, Y], [0, I]].
        let xg = x.submatrix(0, o, n, sz);
        let upd = xg.matmul(&y);
        for r in 0..n {
            for c in 0..rest {
                x[(r, o + sz + c)] += upd[(r, c)];
            }
        }
        let tail = x_inv.submatrix(o + sz, 0, rest, n);
        let upd = y.matmul(&tail);
        for r in 0..sz {
            for c in 0..n {
                x_inv[(o + r, c)] -= upd[(r, c)];
            }
        }
    }
    let mut t = s.t;
    for g in 0..sizes.len() {
        let (o, sz) = (offsets[g], sizes[g]);
        for r in o..o + sz {
            for c in (o + sz)..n {
                t[(r, c)] = ZERO;
            }
        }
    }
    Ok(Decoupled { q: s.q, t, x, x_inv, offsets, sizes })
}

/// Jordan structure of one cluster block `t_c` (upper triangular).
pub(crate) struct ClusterJordan {
    pub eigenvalue: C64,
    /// Block sizes, largest first.
    pub sizes: Vec<usize>,
    /// Columns are the Jordan chains, each ordered from eigenvector upwards.
    pub basis: DenseMatrix,
}

fn rank_with(a: &DenseMatrix, threshold: f64) -> usize {
    svd(a).rank(threshold)
}

/// Orthonormal basis of the span of the columns of `b` (first `count`
/// left singular vectors).
fn leading_left(b: &DenseMatrix, count: usize) -> DenseMatrix {
    let s = svd(b);
    s.u.select_columns(&(0..count).collect::<Vec<_>>())
}

pub(crate) fn cluster_jordan(tc: &DenseMatrix, block_norm: f64, tol: &Tolerances) -> Result<ClusterJordan> {
    let s = tc.rows();
    let mu = tc.trace() / s as f64;
    if s == 1 {
        return Ok(ClusterJordan { eigenvalue: mu, sizes: alloc::vec![1], basis: DenseMatrix::identity(1) });
    }
    let nmat = tc.add_identity(-mu);
    let nnorm = nmat.fro_norm();
    let thr = |j: usize| tol.nil * block_norm * nnorm.powi(j as i32 - 1);
    // ranks[j] = rank(N^j), powers[j] = N^j.
    let mut powers = alloc::vec![DenseMatrix::identity(s)];
    let mut ranks = alloc::vec![s];
    while *ranks.last().unwrap() > 0 {
        let j = powers.len();
        if j > s {
            return Err(TensorError::IllConditioned(format!(
                "cluster of size {s} at {mu} is not nilpotent after shifting"
            )));
        }
        let next = powers[j - 1].matmul(&nmat);
        ranks.push(rank_with(&next, thr(j)));
        powers.push(next);
    }
    let nu = ranks.len() - 1;
    // Weyr characteristic: w[j] = rank(N^{j-1}) - rank(N^j), j = 1..=nu.
    let mut w = alloc::vec![0usize; nu + 2];
    for j in 1..=nu {
        if ranks[j] >= ranks[j - 1] {
            return Err(TensorError::IllConditioned(format!(
                "rank sequence {ranks:?} of the shifted cluster at {mu} stalls"
            )));
        }
        w[j] = ranks[j - 1] - ranks[j];
    }
    if (2..=nu).any(|j| w[j] > w[j - 1]) {
        return Err(TensorError::IllConditioned(format!("inconsistent Weyr characteristic {:?} at {mu}", &w[1..=nu])));
    }
    let kernels: Vec<DenseMatrix> =
        (0..=nu).map(|j| if j == 0 { DenseMatrix::zeros(s, 0) } else { null_space(&powers[j], thr(j)) }).collect();
    let mut chains: Vec<(Vec<C64>, usize)> = Vec::new();
    for j in (1..=nu).rev() {
        let need = w[j] - w[j + 1];
        if need == 0 {
            continue;
        }
        let mut b = kernels[j - 1].clone();
        for (v, len) in &chains {
            let lifted = powers[len - j].matmul(&column_matrix(v));
            b = b.hcat(&lifted);
        }
        let kj = &kernels[j];
        let r = if b.cols() == 0 {
            kj.clone()
        } else {
            let bo = leading_left(&b, b.cols().min(s));
            kj - &bo.matmul(&bo.adjoint().matmul(kj))
        };
        let tops = leading_left(&r, need);
        for c in 0..need {
            chains.push((tops.column(c), j));
        }
    }
    let mut basis = DenseMatrix::zeros(s, 0);
    let mut sizes = Vec::with_capacity(chains.len());
    for (v, len) in &chains {
        let vm = column_matrix(v);
        let cols: Vec<DenseMatrix> = (0..*len).rev().map(|e| powers[e].matmul(&vm)).collect();
        let big = cols.iter().map(DenseMatrix::fro_norm).fold(0.0, f64::max);
        let inv = if big > 0.0 { 1.0 / big } else { 1.0 };
        for c in cols {
            basis = basis.hcat(&c.scale(C64::new(inv, 0.0)));
        }
        sizes.push(*len);
    }
    if basis.cols() != s {
        return Err(TensorError::IllConditioned(format!(
            "Jordan chains span {} of {s} dimensions at {mu}",
            basis.cols()
        )));
    }
    let sv = svd(&basis).sigma;
    if sv[s - 1] <= 1e-12 * sv[0] {
        return Err(TensorError::IllConditioned(format!("Jordan chains at {mu} are linearly dependent")));
    }
    Ok(ClusterJordan { eigenvalue: mu, sizes, basis })
}

fn column_matrix(v: &[C64]) -> DenseMatrix {
    DenseMatrix::from_vec(v.len(), 1, v.to_vec()).expect("column")
}

/// Jordan matrix with the given blocks, ones on the superdiagonal.
pub(crate) fn jordan_matrix(blocks: &[JordanBlock]) -> DenseMatrix {
    let n: usize = blocks.iter().map(|b| b.size).sum();
    let mut j = DenseMatrix::zeros(n, n);
    let mut o = 0;
    for b in blocks {
        for k in 0..b.size {
            j[(o + k, o + k)] = b.eigenvalue;
            if k + 1 < b.size {
                j[(o + k, o + k + 1)] = ONE;
            }
        }
        o += b.size;
    }
    j
}

/// Jordan decomposition `d = s j s^{-1}` of one Fourier block.
pub(crate) struct BlockJordan {
    pub s: DenseMatrix,
    pub s_inv: DenseMatrix,
    pub j: DenseMatrix,
    pub blocks: Vec<JordanBlock>,
}

pub(crate) fn block_jordan(d: &DenseMatrix, bs: &BlockScale, tol: &Tolerances) -> Result<BlockJordan> {
    let n = d.rows();
    if bs.negligible {
        return Ok(BlockJordan {
            s: DenseMatrix::identity(n),
            s_inv: DenseMatrix::identity(n),
            j: DenseMatrix::zeros(n, n),
            blocks: (0..n).map(|_| JordanBlock { eigenvalue: ZERO, size: 1 }).collect(),
        });
    }
    let spec = Spectrum::new(d, bs, tol)?;
    let g = spec.clusters.len();
    let dec = spec.decouple(&(0..g).collect::<Vec<_>>(), g)?;
    let mut bases = Vec::with_capacity(g);
    let mut bases_inv = Vec::with_capacity(g);
    let mut blocks = Vec::new();
    for k in 0..g {
        let cj = cluster_jordan(&dec.diagonal_block(k), bs.norm, tol)?;
        bases_inv.push(Lu::pivoted(&cj.basis).inverse());
        bases.push(cj.basis);
        blocks.extend(cj.sizes.iter().map(|&size| JordanBlock { eigenvalue: cj.eigenvalue, size }));
    }
    let s = dec.basis().matmul(&DenseMatrix::block_diag(&bases));
    let s_inv = DenseMatrix::block_diag(&bases_inv).matmul(&dec.basis_inv());
    let j = jordan_matrix(&blocks);
    let err = (&s.matmul(&j).matmul(&s_inv) - d).fro_norm();
    if !(err <= tol.jordan * bs.norm.max(bs.floor)) {
        return Err(TensorError::IllConditioned(format!(
            "Jordan reconstruction error {err:.3e} exceeds {:.3e}",
            tol.jordan * bs.norm
        )));
    }
    Ok(BlockJordan { s, s_inv, j, blocks })
}

/// Drazin inverse, core and nilpotent parts of one block from the split
/// into the nonzero and zero spectral parts.
pub(crate) struct CoreSplit {
    pub drazin: DenseMatrix,
    pub core: DenseMatrix,
    pub nilpotent: DenseMatrix,
    /// Algebraic multiplicity of the eigenvalue zero.
    pub zero_dim: usize,
}

pub(crate) fn core_split(d: &DenseMatrix, bs: &BlockScale, tol: &Tolerances) -> Result<CoreSplit> {
    let n = d.rows();
    if bs.negligible {
        return Ok(CoreSplit {
            drazin: DenseMatrix::zeros(n, n),
            core: DenseMatrix::zeros(n, n),
            nilpotent: d.clone(),
            zero_dim: n,
        });
    }
    let spec = Spectrum::new(d, bs, tol)?;
    let zero = spec.zero_cluster(tol)?;
    let Some(z) = zero else {
        return Ok(CoreSplit {
            drazin: Lu::pivoted(d).inverse(),
            core: d.clone(),
            nilpotent: DenseMatrix::zeros(n, n),
            zero_dim: 0,
        });
    };
    if spec.clusters.len() == 1 {
        return Ok(CoreSplit {
            drazin: DenseMatrix::zeros(n, n),
            core: DenseMatrix::zeros(n, n),
            nilpotent: d.clone(),
            zero_dim: n,
        });
    }
    let groups: Vec<usize> = (0..spec.clusters.len()).map(|k| usize::from(k == z)).collect();
    let dec = spec.decouple(&groups, 2)?;
    let t11 = dec.diagonal_block(0);
    let t22 = dec.diagonal_block(1);
    let zero_dim = t22.rows();
    let z11 = DenseMatrix::zeros(t11.rows(), t11.rows());
    let z22 = DenseMatrix::zeros(t22.rows(), t22.rows());
    let drazin = dec.assemble(&[upper_triangular_inverse(&t11), z22.clone()]);
    let core = dec.assemble(&[t11, z22]);
    let nilpotent = dec.assemble(&[z11, t22]);
    Ok(CoreSplit { drazin, core, nilpotent, zero_dim })
}
