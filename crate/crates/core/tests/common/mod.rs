#![allow(dead_code)]

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ttensor::{fro_norm, Tensor3, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `||a - b||_F / max(||b||_F, 1)`.
pub fn rel(a: &Tensor3, b: &Tensor3) -> f64 {
    fro_norm(&(a - b)) / fro_norm(b).max(1.0)
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn tube(values: &[f64]) -> Tensor3 {
    Tensor3::from_real(1, 1, values.len(), values).unwrap()
}

/// Sorts by (re, im) so multisets can be compared elementwise.
pub fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// Greedy matching distance between two equal-size multisets.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut left: Vec<C64> = b.to_vec();
    let mut worst = 0.0f64;
    for &x in a {
        let (k, d) =
            left.iter().enumerate().map(|(k, &y)| (k, (x - y).norm())).min_by(|u, v| u.1.total_cmp(&v.1)).unwrap();
        worst = worst.max(d);
        left.swap_remove(k);
    }
    worst
}

/// Case count for the property tests; failures are reported, not persisted.
pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { cases, failure_persistence: None, ..Default::default() }
}
