//! Seeded generators for test fixtures with known structure.
//!
//! Every generator draws from a caller-supplied [`RngCore`], so fixtures are
//! reproducible from a seed. Tensors are built in the Fourier domain, where
//! the planted structure lives, and mapped back with the inverse DFT.

use alloc::vec::Vec;

use num_traits::Float;

use rand_core::RngCore;

use crate::dense::qr::qr;
use crate::dense::DenseMatrix;
use crate::spectral::JordanBlock;
use crate::transform::{from_blocks, FourierBlocks};
use crate::{Tensor3, C64, ZERO};

/// Uniform in `[0, 1)`.
pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in `[lo, hi)`.
pub fn uniform_in<R: RngCore>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

pub fn below<R: RngCore>(rng: &mut R, n: usize) -> usize {
    (uniform(rng) * n as f64) as usize % n.max(1)
}

/// Real and imaginary parts uniform in `[-1, 1)`.
pub fn random_complex<R: RngCore>(rng: &mut R) -> C64 {
    C64::new(uniform_in(rng, -1.0, 1.0), uniform_in(rng, -1.0, 1.0))
}

pub fn random_matrix<R: RngCore>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

pub fn random_tensor<R: RngCore>(rng: &mut R, m: usize, n: usize, p: usize) -> Tensor3 {
    let data = (0..m * n * p).map(|_| random_complex(rng)).collect();
    Tensor3::new(m, n, p, data).expect("finite entries")
}

pub fn random_real_tensor<R: RngCore>(rng: &mut R, m: usize, n: usize, p: usize) -> Tensor3 {
    let data: Vec<f64> = (0..m * n * p).map(|_| uniform_in(rng, -1.0, 1.0)).collect();
    Tensor3::from_real(m, n, p, &data).expect("finite entries")
}

/// Haar-like unitary from the QR factor of a random matrix.
pub fn random_unitary<R: RngCore>(rng: &mut R, n: usize) -> DenseMatrix {
    qr(&random_matrix(rng, n, n)).0
}

/// `U diag(sigma) V` with `sigma` log-spaced in `[1, cond]`.
pub fn conditioned_matrix<R: RngCore>(rng: &mut R, n: usize, cond: f64) -> DenseMatrix {
    let sig: Vec<C64> = (0..n)
        .map(|k| {
            let t = if n > 1 { k as f64 / (n - 1) as f64 } else { 0.0 };
            C64::new(cond.powf(t), 0.0)
        })
        .collect();
    random_unitary(rng, n).matmul(&DenseMatrix::diagonal(&sig)).matmul(&random_unitary(rng, n))
}

pub fn tensor_from_blocks(blocks: Vec<DenseMatrix>) -> Tensor3 {
    from_blocks(&FourierBlocks::new(blocks).expect("square blocks of one size"))
}

/// Invertible tensor whose Fourier blocks all have 2-norm condition number
/// `cond`.
pub fn conditioned_tensor<R: RngCore>(rng: &mut R, n: usize, p: usize, cond: f64) -> Tensor3 {
    tensor_from_blocks((0..p).map(|_| conditioned_matrix(rng, n, cond)).collect())
}

/// Tensor with unitary Fourier blocks, hence T-unitary.
pub fn unitary_tensor<R: RngCore>(rng: &mut R, n: usize, p: usize) -> Tensor3 {
    tensor_from_blocks((0..p).map(|_| random_unitary(rng, n)).collect())
}

/// Nonzero eigenvalues used for planted spectra; any two differ by at least 1.
pub const PALETTE: [C64; 12] = [
    C64::new(1.0, 0.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(0.0, -1.0),
    C64::new(2.0, 0.0),
    C64::new(-2.0, 0.0),
    C64::new(0.0, 2.0),
    C64::new(0.0, -2.0),
    C64::new(1.0, 1.0),
    C64::new(1.0, -1.0),
    C64::new(-1.0, 1.0),
    C64::new(-1.0, -1.0),
];

/// Options for [`planted_jordan`].
#[derive(Debug, Clone, Copy)]
pub struct Plant {
    /// Largest Jordan block size for nonzero eigenvalues.
    pub max_size: usize,
    /// `0`: no zero eigenvalue anywhere. `k >= 1`: some Fourier block carries
    /// a zero Jordan block of size exactly `k`, and no zero block is larger.
    pub zero_index: usize,
    /// Number of distinct palette values drawn per Fourier block; small
    /// values force repeated eigenvalues.
    pub distinct: usize,
    /// Multiplies every palette value.
    pub scale: f64,
    /// Condition number of each Fourier block of the transform.
    pub cond: f64,
}

impl Default for Plant {
    fn default() -> Self {
        Self { max_size: 3, zero_index: 0, distinct: 3, scale: 1.0, cond: 20.0 }
    }
}

/// Tensor with a known T-Jordan structure.
#[derive(Debug, Clone)]
pub struct JordanFixture {
    pub tensor: Tensor3,
    pub structure: Vec<Vec<JordanBlock>>,
    pub transform: Tensor3,
    /// Largest zero Jordan block over all Fourier blocks (the T-index).
    pub zero_index: usize,
}

impl JordanFixture {
    /// Planted blocks of Fourier block `i` as sorted (eigenvalue, size) pairs.
    pub fn multiset(&self, i: usize) -> Vec<(C64, usize)> {
        sorted_multiset(&self.structure[i])
    }
}

/// Jordan blocks as (eigenvalue, size) pairs sorted by (re, im, size).
pub fn sorted_multiset(blocks: &[JordanBlock]) -> Vec<(C64, usize)> {
    let mut v: Vec<(C64, usize)> = blocks.iter().map(|b| (b.eigenvalue, b.size)).collect();
    v.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)).then(a.1.cmp(&b.1)));
    v
}

/// True when `got` and `want` hold the same (eigenvalue, size) pairs, with
/// eigenvalues matched to within `radius`.
pub fn same_structure(got: &[JordanBlock], want: &[JordanBlock], radius: f64) -> bool {
    if got.len() != want.len() {
        return false;
    }
    let mut free: Vec<bool> = alloc::vec![true; got.len()];
    want.iter().all(|w| {
        let hit = got
            .iter()
            .enumerate()
            .position(|(k, g)| free[k] && g.size == w.size && (g.eigenvalue - w.eigenvalue).norm() <= radius);
        hit.map(|k| free[k] = false).is_some()
    })
}

fn fill_sizes<R: RngCore>(rng: &mut R, mut left: usize, max_size: usize, out: &mut Vec<usize>) {
    while left > 0 {
        let s = 1 + below(rng, max_size.min(left).max(1));
        out.push(s);
        left -= s;
    }
}

fn plant_block<R: RngCore>(rng: &mut R, n: usize, opts: &Plant, forced_zero: usize) -> Vec<JordanBlock> {
    let zero = C64::new(0.0, 0.0);
    let mut blocks = Vec::new();
    let mut left = n;
    if forced_zero > 0 {
        blocks.push(JordanBlock { eigenvalue: zero, size: forced_zero });
        left -= forced_zero;
    }
    // Extra zero blocks no larger than the index, half of the time.
    if opts.zero_index > 0 && left > 0 && below(rng, 2) == 0 {
        let s = 1 + below(rng, opts.zero_index.min(left));
        blocks.push(JordanBlock { eigenvalue: zero, size: s });
        left -= s;
    }
    let mut pool: Vec<C64> = PALETTE.to_vec();
    let mut chosen = Vec::new();
    for _ in 0..opts.distinct.clamp(1, PALETTE.len()) {
        chosen.push(pool.swap_remove(below(rng, pool.len())) * opts.scale);
    }
    let mut sizes = Vec::new();
    fill_sizes(rng, left, opts.max_size, &mut sizes);
    for s in sizes {
        blocks.push(JordanBlock { eigenvalue: chosen[below(rng, chosen.len())], size: s });
    }
    // Shuffle so the zero blocks are not always leading.
    for k in (1..blocks.len()).rev() {
        blocks.swap(k, below(rng, k + 1));
    }
    blocks
}

/// `P^{-1} * J * P` with a random planted Jordan structure per Fourier
/// block and a random transform `P` of the requested conditioning.
pub fn planted_jordan<R: RngCore>(rng: &mut R, n: usize, p: usize, opts: &Plant) -> JordanFixture {
    assert!(opts.zero_index <= n, "zero block larger than the tensor");
    let carrier = below(rng, p);
    let structure: Vec<Vec<JordanBlock>> =
        (0..p).map(|i| plant_block(rng, n, opts, if i == carrier { opts.zero_index } else { 0 })).collect();
    let transform = conditioned_tensor(rng, n, p, opts.cond);
    let tensor = crate::spectral::jordan_synthesize(&structure, &transform, &crate::Tolerances::DEFAULT)
        .expect("transform is well conditioned");
    JordanFixture { tensor, structure, transform, zero_index: opts.zero_index }
}

/// Per-block `U [C 0; 0 0] U^H` with unitary `U` and invertible `C` of rank
/// at least one: T-range-Hermitian, T-index at most 1.
pub fn range_hermitian<R: RngCore>(rng: &mut R, n: usize, p: usize) -> Tensor3 {
    tensor_from_blocks(
        (0..p)
            .map(|_| {
                let u = random_unitary(rng, n);
                index_one_block(rng, n, &u, true)
            })
            .collect(),
    )
}

/// Per-block `P^{-1} [C 0; 0 0] P` with a non-unitary `P`; T-index 1 but
/// the ranges of the block and its adjoint differ.
pub fn non_range_hermitian<R: RngCore>(rng: &mut R, n: usize, p: usize) -> Tensor3 {
    assert!(n >= 2, "a 1x1 block is always range Hermitian");
    tensor_from_blocks(
        (0..p)
            .map(|_| {
                let x = conditioned_matrix(rng, n, 10.0);
                index_one_block(rng, n, &x, false)
            })
            .collect(),
    )
}

fn index_one_block<R: RngCore>(rng: &mut R, n: usize, basis: &DenseMatrix, unitary: bool) -> DenseMatrix {
    let r = if n == 1 { 1 } else { 1 + below(rng, n - 1) };
    let c = conditioned_matrix(rng, r, 5.0);
    let mut core = DenseMatrix::zeros(n, n);
    core.set_submatrix(0, 0, &c);
    let inv = if unitary { basis.adjoint() } else { crate::dense::lu::Lu::pivoted(basis).inverse() };
    inv.matmul(&core).matmul(basis)
}

/// Strictly diagonally dominant Fourier blocks: every leading minor is
/// nonsingular, so LU without pivoting succeeds.
pub fn diagonally_dominant<R: RngCore>(rng: &mut R, n: usize, p: usize) -> Tensor3 {
    tensor_from_blocks(
        (0..p)
            .map(|_| {
                let mut d = random_matrix(rng, n, n);
                for i in 0..n {
                    let off: f64 = (0..n).filter(|&j| j != i).map(|j| d[(i, j)].norm()).sum();
                    let phase = random_complex(rng);
                    d[(i, i)] = phase / phase.norm() * (off + 1.0);
                }
                d
            })
            .collect(),
    )
}

/// Hermitian tensor with Fourier-block eigenvalues drawn from `[lo, hi]`.
pub fn hermitian_with_spectrum<R: RngCore>(rng: &mut R, n: usize, p: usize, lo: f64, hi: f64) -> Tensor3 {
    tensor_from_blocks(
        (0..p)
            .map(|_| {
                let u = random_unitary(rng, n);
                let ev: Vec<C64> = (0..n).map(|_| C64::new(uniform_in(rng, lo, hi), 0.0)).collect();
                u.matmul(&DenseMatrix::diagonal(&ev)).matmul(&u.adjoint())
            })
            .collect(),
    )
}

/// Tensor whose T-eigenvalues all have modulus at most `radius`: a random
/// triangular Fourier block conjugated by a transform of condition `cond`.
pub fn bounded_spectrum<R: RngCore>(rng: &mut R, n: usize, p: usize, radius: f64, cond: f64) -> Tensor3 {
    tensor_from_blocks(
        (0..p)
            .map(|_| {
                let mut t = DenseMatrix::zeros(n, n);
                for i in 0..n {
                    let rho = radius * uniform(rng).sqrt();
                    let theta = uniform_in(rng, 0.0, core::f64::consts::TAU);
                    t[(i, i)] = C64::from_polar(rho, theta);
                    for j in i + 1..n {
                        t[(i, j)] = random_complex(rng) * 0.3 * radius;
                    }
                }
                let x = conditioned_matrix(rng, n, cond);
                let xi = crate::dense::lu::Lu::pivoted(&x).inverse();
                x.matmul(&t).matmul(&xi)
            })
            .collect(),
    )
}

/// Returns `(a, b)` with `a = f(base)` and `b = g(base)` for random
/// polynomials `f, g` of degree `degree`, so `a * b = b * a`. The base has
/// Fourier blocks of spectral radius about one.
pub fn commuting_pair<R: RngCore>(rng: &mut R, n: usize, p: usize, degree: usize, scale: f64) -> (Tensor3, Tensor3) {
    let base = random_tensor(rng, n, n, p).scale(C64::new(1.0 / ((n * p) as f64).sqrt(), 0.0));
    let poly = |rng: &mut R| {
        let c: Vec<C64> = (0..=degree).map(|_| random_complex(rng) * scale).collect();
        crate::algebra::tpoly_eval(&c, &base).expect("square tensor")
    };
    let a = poly(rng);
    let b = poly(rng);
    (a, b)
}

/// Nilpotent tensor of T-index exactly `k`: planted zero Jordan blocks only.
pub fn nilpotent<R: RngCore>(rng: &mut R, n: usize, p: usize, k: usize, cond: f64) -> JordanFixture {
    assert!((1..=n).contains(&k));
    let carrier = below(rng, p);
    let structure: Vec<Vec<JordanBlock>> = (0..p)
        .map(|i| {
            let mut sizes = Vec::new();
            let mut left = n;
            if i == carrier {
                sizes.push(k);
                left -= k;
            }
            fill_sizes(rng, left, k, &mut sizes);
            sizes.into_iter().map(|s| JordanBlock { eigenvalue: ZERO, size: s }).collect()
        })
        .collect();
    let transform = conditioned_tensor(rng, n, p, cond);
    let tensor = crate::spectral::jordan_synthesize(&structure, &transform, &crate::Tolerances::DEFAULT)
        .expect("transform is well conditioned");
    JordanFixture { tensor, structure, transform, zero_index: k }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ginv::t_index;
    use crate::spectral::{jordan_structure, t_eigenvalues};
    use crate::Tolerances;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let u = uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
            assert!(below(&mut rng, 5) < 5);
        }
    }

    #[test]
    fn planted_structure_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tol = Tolerances::DEFAULT;
        for k in 0..3 {
            let f = planted_jordan(&mut rng, 4, 3, &Plant { zero_index: k, ..Plant::default() });
            let got = jordan_structure(&f.tensor, &tol).unwrap();
            for (g, w) in got.iter().zip(&f.structure) {
                assert!(same_structure(g, w, 1e-6), "{g:?} vs {w:?}");
            }
            assert_eq!(t_index(&f.tensor, &tol).unwrap(), k);
        }
    }

    #[test]
    fn bounded_spectrum_respects_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = bounded_spectrum(&mut rng, 3, 4, 0.5, 10.0);
        assert!(t_eigenvalues(&a).unwrap().max_modulus() <= 0.5 + 1e-10);
    }
}
