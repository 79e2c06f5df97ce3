//! Grouping of computed eigenvalues into numerical multiple eigenvalues.
//!
//! An eigenvalue of algebraic multiplicity `s` sitting in a Jordan block
//! splits under a relative perturbation `eps` into roughly `eps^(1/s)`
//! times the block scale. A set of `s` eigenvalues is therefore admissible
//! as one cluster when its diameter is at most `2 * scale * tol^(1/s)`.
//! Clusters are formed greedily, largest admissible set first, where the
//! candidates are a seed value together with its nearest unassigned
//! neighbours.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Float;

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Cluster {
    pub center: C64,
    /// Indices into the eigenvalue list that was clustered.
    pub members: Vec<usize>,
}

pub(crate) fn threshold(scale: f64, tol: f64, size: usize) -> f64 {
    2.0 * scale * tol.powf(1.0 / size as f64)
}

/// Lexicographic order on (re, im), used for every deterministic sort.
pub(crate) fn lex(a: &C64, b: &C64) -> Ordering {
    a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
}

/// Clusters `values`; the result is sorted by center.
pub(crate) fn cluster_eigenvalues(values: &[C64], scale: f64, tol: f64) -> Vec<Cluster> {
    let dist = |i: usize, j: usize| (values[i] - values[j]).norm();
    let mut free: Vec<usize> = (0..values.len()).collect();
    let mut clusters = Vec::new();
    while !free.is_empty() {
        // (size, ratio, members) of the best candidate so far.
        let mut best: Option<(usize, f64, Vec<usize>)> = None;
        for &seed in &free {
            let mut near = free.clone();
            near.sort_by(|&a, &b| dist(seed, a).partial_cmp(&dist(seed, b)).unwrap_or(Ordering::Equal));
            for size in (1..=near.len()).rev() {
                if best.as_ref().is_some_and(|b| b.0 > size) {
                    break;
                }
                let cand = &near[..size];
                let diam = cand
                    .iter()
                    .flat_map(|&i| cand.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| dist(i, j))
                    .fold(0.0, f64::max);
                let limit = threshold(scale, tol, size);
                if diam <= limit {
                    let ratio = if limit > 0.0 { diam / limit } else { 0.0 };
                    let better = match &best {
                        None => true,
                        Some((bs, br, _)) => size > *bs || (size == *bs && ratio < *br),
                    };
                    if better {
                        let mut members = cand.to_vec();
                        members.sort_unstable();
                        best = Some((size, ratio, members));
                    }
                    break;
                }
            }
        }
        let (_, _, members) = best.expect("singletons are always admissible");
        free.retain(|i| !members.contains(i));
        let sum: C64 = members.iter().map(|&i| values[i]).sum();
        clusters.push(Cluster { center: sum / members.len() as f64, members });
    }
    clusters.sort_by(|x, y| lex(&x.center, &y.center));
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_values_stay_apart() {
        let v = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0)];
        let c = cluster_eigenvalues(&v, 1.0, 1e-6);
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].center, C64::new(-1.0, 0.0));
    }

    #[test]
    fn split_jordan_triple_is_merged() {
        // eps^(1/3) splitting of a triple eigenvalue at 2.
        let r = 1e-4;
        let v: Vec<C64> = (0..3)
            .map(|k| C64::new(2.0, 0.0) + C64::from_polar(r, 2.0 * core::f64::consts::PI * k as f64 / 3.0))
            .chain(core::iter::once(C64::new(5.0, 0.0)))
            .collect();
        let c = cluster_eigenvalues(&v, 5.0, 1e-6);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].members.len(), 3);
        assert!((c[0].center - C64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_scale_collapses_exact_duplicates() {
        let v = [C64::new(0.0, 0.0); 4];
        let c = cluster_eigenvalues(&v, 0.0, 1e-6);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].members.len(), 4);
    }
}
