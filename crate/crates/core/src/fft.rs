//! Mixed-radix DFT over sequences of equal-length vectors.
//!
//! Tube transforms treat each frontal slice as one vector, so a single
//! recursion handles all `m*n` tubes at once. Lengths are factored into
//! primes; prime factors use a direct DFT, so every `p` is exact and smooth
//! lengths take `O(p log p)` vector operations.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::{C64, ZERO};

fn smallest_factor(p: usize) -> usize {
    if p % 2 == 0 {
        return 2;
    }
    let mut f = 3;
    while f * f <= p {
        if p % f == 0 {
            return f;
        }
        f += 2;
    }
    p
}

/// `e^{sign * 2 pi i k / p}`.
fn twiddle(sign: f64, k: usize, p: usize) -> C64 {
    // Quarter turns are exact, so e.g. 1 + e^{i pi} vanishes.
    let k = k % p;
    if (4 * k) % p == 0 {
        return match 4 * k / p {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, sign),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -sign),
        };
    }
    let theta = sign * 2.0 * PI * ((k % p) as f64) / (p as f64);
    C64::new(theta.cos(), theta.sin())
}

/// `out[i] = sum_k x[k] * e^{sign 2 pi i ik/p}` for vectors `x[k]` of length `len`.
fn transform(x: &[&[C64]], len: usize, sign: f64) -> Vec<Vec<C64>> {
    let p = x.len();
    if p == 1 {
        return vec![x[0].to_vec()];
    }
    let r = smallest_factor(p);
    if r == p {
        let mut out = vec![vec![ZERO; len]; p];
        for (i, o) in out.iter_mut().enumerate() {
            for (k, xk) in x.iter().enumerate() {
                let w = twiddle(sign, i * k, p);
                for (oj, &xj) in o.iter_mut().zip(xk.iter()) {
                    *oj += w * xj;
                }
            }
        }
        return out;
    }
    let m = p / r;
    // Decimation in time: sub-sequence q holds x[q + r t].
    let subs: Vec<Vec<Vec<C64>>> = (0..r)
        .map(|q| {
            let seq: Vec<&[C64]> = (0..m).map(|t| x[q + r * t]).collect();
            transform(&seq, len, sign)
        })
        .collect();
    if r == 2 {
        // Butterfly: out[i] = s0[i] + w s1[i], out[i + m] = s0[i] - w s1[i].
        let mut out = vec![Vec::new(); p];
        for i in 0..m {
            let w = twiddle(sign, i, p);
            let (s0, s1) = (&subs[0][i], &subs[1][i]);
            let (lo, hi): (Vec<C64>, Vec<C64>) = s0
                .iter()
                .zip(s1.iter())
                .map(|(&a, &b)| {
                    let t = w * b;
                    (a + t, a - t)
                })
                .unzip();
            out[i] = lo;
            out[i + m] = hi;
        }
        return out;
    }
    let mut out = vec![vec![ZERO; len]; p];
    for (i, o) in out.iter_mut().enumerate() {
        for (q, sub) in subs.iter().enumerate() {
            let w = twiddle(sign, q * i, p);
            for (oj, &yj) in o.iter_mut().zip(sub[i % m].iter()) {
                *oj += w * yj;
            }
        }
    }
    out
}

/// Unnormalized forward DFT with `omega = e^{-2 pi i / p}`.
pub(crate) fn forward(x: &[&[C64]], len: usize) -> Vec<Vec<C64>> {
    transform(x, len, -1.0)
}

/// Inverse DFT including the `1/p` factor.
pub(crate) fn inverse(x: &[&[C64]], len: usize) -> Vec<Vec<C64>> {
    let p = x.len() as f64;
    let mut out = transform(x, len, 1.0);
    for v in out.iter_mut() {
        for z in v.iter_mut() {
            *z /= p;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[C64], sign: f64) -> Vec<C64> {
        let p = x.len();
        (0..p).map(|i| (0..p).map(|k| twiddle(sign, i * k, p) * x[k]).sum()).collect()
    }

    #[test]
    fn matches_naive_for_many_lengths() {
        for p in 1..=30 {
            let x: Vec<C64> = (0..p).map(|k| C64::new((k as f64).sin(), (2.0 * k as f64).cos())).collect();
            let rows: Vec<[C64; 1]> = x.iter().map(|&z| [z]).collect();
            let refs: Vec<&[C64]> = rows.iter().map(|r| &r[..]).collect();
            let fast = forward(&refs, 1);
            let slow = naive(&x, -1.0);
            for i in 0..p {
                assert!((fast[i][0] - slow[i]).norm() < 1e-12, "p={p} i={i}");
            }
            let fast_refs: Vec<&[C64]> = fast.iter().map(|v| &v[..]).collect();
            let back = inverse(&fast_refs, 1);
            for k in 0..p {
                assert!((back[k][0] - x[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn two_point_transform() {
        let a = [C64::new(1.0, 0.0)];
        let b = [C64::new(2.0, 0.0)];
        let out = forward(&[&a, &b], 1);
        assert_eq!(out[0][0], C64::new(3.0, 0.0));
        assert!((out[1][0] - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }
}
