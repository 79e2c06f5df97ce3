//! T-functions: matrix functions applied to every Fourier block.

use alloc::vec::Vec;

use num_traits::Float;

use crate::algebra::{block_inverse, horner};
use crate::dense::funm::{expm, logm};
use crate::dense::DenseMatrix;
use crate::error::{Result, TensorError};
use crate::spectral::block_eigenvalues;
use crate::transform::{from_blocks, to_blocks};
use crate::{fro_norm, Tensor3, Tolerances, C64, ONE, ZERO};

/// `f` applied to every Fourier block of `a`.
pub fn tfunc_apply<F>(a: &Tensor3, f: F) -> Result<Tensor3>
where
    F: Fn(&DenseMatrix) -> Result<DenseMatrix> + Sync + Send,
{
    let blocks = to_blocks(a)?;
    Ok(from_blocks(&blocks.try_map(|_, d| f(d))?))
}

/// The standard T-functions. `Log1p` is `ln(I + a)` and `AlphaPower(alpha)`
/// is `(I + a)^alpha`, both on the principal branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedFunction {
    Exp,
    Sin,
    Cos,
    Log1p,
    AlphaPower(C64),
}

impl NamedFunction {
    /// Convergence radius of the Taylor series at zero.
    pub fn radius(&self) -> f64 {
        match self {
            NamedFunction::Exp | NamedFunction::Sin | NamedFunction::Cos => f64::INFINITY,
            NamedFunction::Log1p | NamedFunction::AlphaPower(_) => 1.0,
        }
    }

    /// `k`-th Taylor coefficient at zero.
    pub fn coefficient(&self, k: usize) -> C64 {
        let fact = |k: usize| (1..=k).fold(1.0, |acc, j| acc * j as f64);
        match *self {
            NamedFunction::Exp => C64::new(1.0 / fact(k), 0.0),
            NamedFunction::Sin if k % 2 == 1 => C64::new(if k % 4 == 1 { 1.0 } else { -1.0 } / fact(k), 0.0),
            NamedFunction::Cos if k % 2 == 0 => C64::new(if k % 4 == 0 { 1.0 } else { -1.0 } / fact(k), 0.0),
            NamedFunction::Sin | NamedFunction::Cos => ZERO,
            NamedFunction::Log1p if k == 0 => ZERO,
            NamedFunction::Log1p => C64::new(if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64, 0.0),
            NamedFunction::AlphaPower(alpha) => {
                // binom(alpha, k) = prod_{j<k} (alpha - j) / (j + 1)
                (0..k).fold(ONE, |acc, j| acc * (alpha - j as f64) / (j as f64 + 1.0))
            }
        }
    }
}

fn radius_check(a: &Tensor3, radius: f64) -> Result<f64> {
    let ev = block_eigenvalues(&to_blocks(a)?)?;
    let modulus = ev.max_modulus();
    if radius.is_finite() && !(modulus < radius) {
        return Err(TensorError::Radius { modulus, radius });
    }
    Ok(modulus)
}

fn cis_pair(d: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let i = C64::new(0.0, 1.0);
    (expm(&d.scale(i)), expm(&d.scale(-i)))
}

/// Named function evaluated with dense matrix-function algorithms on each
/// Fourier block. `Log1p` and `AlphaPower` require every T-eigenvalue to lie
/// inside the unit disk.
pub fn named_tfunc(name: NamedFunction, a: &Tensor3) -> Result<Tensor3> {
    a.require_f_square("named_tfunc")?;
    if name.radius().is_finite() {
        radius_check(a, name.radius())?;
    }
    let half = C64::new(0.5, 0.0);
    tfunc_apply(a, |d| match name {
        NamedFunction::Exp => Ok(expm(d)),
        NamedFunction::Cos => {
            let (p, m) = cis_pair(d);
            Ok((&p + &m).scale(half))
        }
        NamedFunction::Sin => {
            let (p, m) = cis_pair(d);
            Ok((&p - &m).scale(C64::new(0.0, -0.5)))
        }
        NamedFunction::Log1p => logm(&d.add_identity(ONE)),
        NamedFunction::AlphaPower(alpha) => Ok(expm(&logm(&d.add_identity(ONE))?.scale(alpha))),
    })
}

/// Truncated power series with a heuristic estimate of the neglected tail.
#[derive(Debug, Clone)]
pub struct SeriesValue {
    pub value: Tensor3,
    /// `|c_K| l^K sum_{j=1..K} r^j`, with `l` the largest T-eigenvalue
    /// modulus and `r` the ratio `l / radius` (or `l |c_K / c_{K-1}|` for
    /// entire series).
    pub tail_estimate: f64,
}

/// `sum_{k=0..=trunc} c_k a^k` by Horner's rule on every block, after
/// checking that every T-eigenvalue lies strictly inside `radius`.
pub fn series_eval<F>(coeffs: F, radius: f64, a: &Tensor3, trunc: usize) -> Result<SeriesValue>
where
    F: Fn(usize) -> C64,
{
    a.require_f_square("series_eval")?;
    if trunc == 0 {
        return Err(crate::error::shape_err("series truncation order must be at least 1"));
    }
    let l0 = radius_check(a, radius)?;
    let c: Vec<C64> = (0..=trunc).map(coeffs).collect();
    let value = from_blocks(&to_blocks(a)?.map(|_, d| horner(&c, d)));
    let last = c[trunc].norm();
    let ratio = if radius.is_finite() {
        l0 / radius
    } else if c[trunc - 1].norm() > 0.0 {
        l0 * last / c[trunc - 1].norm()
    } else {
        0.0
    };
    let geometric: f64 = (1..=trunc).map(|j| ratio.powi(j as i32)).sum();
    Ok(SeriesValue { value, tail_estimate: last * l0.powi(trunc as i32) * geometric })
}

/// Principal solution of `x^alpha = a`, `x = exp(log(a) / alpha)` blockwise.
/// For a positive integer `alpha` the root is checked against `tpow`.
pub fn alpha_root(a: &Tensor3, alpha: C64, tol: &Tolerances) -> Result<Tensor3> {
    a.require_f_square("alpha_root")?;
    if alpha == ZERO {
        return Err(TensorError::Domain("root of order zero".into()));
    }
    let blocks = to_blocks(a)?;
    let inv_alpha = ONE / alpha;
    let top = blocks.max_block_norm();
    let roots = blocks.try_map(|i, d| {
        block_inverse(d, i, top, tol)?;
        Ok(expm(&logm(d)?.scale(inv_alpha)))
    })?;
    let x = from_blocks(&roots);
    if alpha.im == 0.0 && alpha.re > 0.0 && alpha.re.fract() == 0.0 && alpha.re <= 64.0 {
        let back = crate::algebra::tpow(&x, alpha.re as usize)?;
        let err = fro_norm(&(&back - a));
        if err > tol.solve * fro_norm(a) {
            return Err(TensorError::IllConditioned(alloc::format!(
                "root raised to the power {} misses the input by {err:.3e}",
                alpha.re
            )));
        }
    }
    Ok(x)
}
