mod common;

use std::f64::consts::PI;

use common::{c, rel, rng, tube};
use proptest::prelude::*;
use ttensor::algebra::{commutator, tinv, tpow, tprod, tprod3};
use ttensor::dense::funm::expm;
use ttensor::fixtures::{bounded_spectrum, commuting_pair, conditioned_tensor, random_tensor};
use ttensor::oracle::{dense_tfunc, DenseFunction};
use ttensor::tfunc::{alpha_root, named_tfunc, series_eval, tfunc_apply, NamedFunction};
use ttensor::{conj_transpose, fro_norm, identity_tensor, Tensor3, Tolerances, C64};

const TOL: Tolerances = Tolerances::DEFAULT;

fn small(seed: u64, n: usize, p: usize) -> Tensor3 {
    random_tensor(&mut rng(seed), n, n, p).scale(c(1.0 / ((n * p) as f64).sqrt()))
}

fn exp(a: &Tensor3) -> Tensor3 {
    named_tfunc(NamedFunction::Exp, a).unwrap()
}

proptest! {
    #![proptest_config(common::config(48))]

    #[test]
    fn functions_commute_with_their_argument((n, p, seed) in (1usize..5, 1usize..5, any::<u64>())) {
        let a = small(seed, n, p);
        for f in [NamedFunction::Exp, NamedFunction::Sin, NamedFunction::Cos] {
            let fa = named_tfunc(f, &a).unwrap();
            prop_assert!(fro_norm(&commutator(&a, &fa).unwrap()) < 1e-12 * fro_norm(&fa).max(1.0));
        }
    }

    #[test]
    fn functions_respect_similarity((n, p, seed) in (1usize..5, 1usize..5, any::<u64>())) {
        let mut g = rng(seed);
        let a = random_tensor(&mut g, n, n, p).scale(c(0.5));
        let t = conditioned_tensor(&mut g, n, p, 10.0);
        let ti = tinv(&t, &TOL).unwrap();
        let lhs = exp(&tprod3(&ti, &a, &t).unwrap());
        let rhs = tprod3(&ti, &exp(&a), &t).unwrap();
        prop_assert!(rel(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn functions_commute_with_conjugate_transpose((n, p, seed) in (1usize..5, 1usize..5, any::<u64>())) {
        let a = small(seed, n, p);
        prop_assert!(rel(&exp(&conj_transpose(&a)), &conj_transpose(&exp(&a))) < 1e-12);
    }

    #[test]
    fn exp_is_periodic_in_the_imaginary_direction((n, p, seed) in (1usize..5, 1usize..5, any::<u64>())) {
        let a = small(seed, n, p);
        let shifted = &a + &identity_tensor(n, p).scale(C64::new(0.0, 2.0 * PI));
        prop_assert!(rel(&exp(&shifted), &exp(&a)) < 1e-11);
    }

    #[test]
    fn exp_of_a_sum_of_commuting_tensors((n, p, seed) in (1usize..4, 1usize..4, any::<u64>())) {
        let (a, b) = commuting_pair(&mut rng(seed), n, p, 2, 0.5);
        let lhs = exp(&(&a + &b));
        let rhs = tprod(&exp(&a), &exp(&b)).unwrap();
        prop_assert!(rel(&lhs, &rhs) < 1e-9);
        let back = tprod(&exp(&a), &exp(&a.scale(c(-1.0)))).unwrap();
        prop_assert!(rel(&back, &identity_tensor(n, p)) < 1e-11);
    }

    #[test]
    fn pythagorean_identity((n, p, seed) in (1usize..5, 1usize..5, any::<u64>())) {
        let a = small(seed, n, p);
        let s = named_tfunc(NamedFunction::Sin, &a).unwrap();
        let co = named_tfunc(NamedFunction::Cos, &a).unwrap();
        let sum = &tprod(&s, &s).unwrap() + &tprod(&co, &co).unwrap();
        prop_assert!(rel(&sum, &identity_tensor(n, p)) < 1e-12);
    }

    #[test]
    fn block_functions_match_the_dense_oracle((n, p, seed) in (1usize..4, 1usize..5, any::<u64>())) {
        let a = small(seed, n, p);
        prop_assert!(rel(&exp(&a), &dense_tfunc(&a, &DenseFunction::Exp).unwrap()) < 1e-11);
        let sq = dense_tfunc(&a, &DenseFunction::Square).unwrap();
        prop_assert!(rel(&tpow(&a, 2).unwrap(), &sq) < 1e-12);
        let via_apply = tfunc_apply(&a, |d| Ok(expm(d))).unwrap();
        prop_assert_eq!(via_apply, exp(&a));
    }

    #[test]
    fn series_agree_with_closed_forms((n, p, seed) in (1usize..4, 1usize..4, any::<u64>())) {
        let a = bounded_spectrum(&mut rng(seed), n, p, 0.4, 5.0);
        for f in [NamedFunction::Exp, NamedFunction::Log1p, NamedFunction::AlphaPower(c(0.5))] {
            let s = series_eval(|k| f.coefficient(k), f.radius(), &a, 80).unwrap();
            let closed = named_tfunc(f, &a).unwrap();
            prop_assert!(rel(&s.value, &closed) < 1e-9, "{f:?}");
        }
    }

    #[test]
    fn log1p_inverts_exp((n, p, seed) in (1usize..4, 1usize..4, any::<u64>())) {
        let a = bounded_spectrum(&mut rng(seed), n, p, 0.6, 5.0);
        let l = named_tfunc(NamedFunction::Log1p, &a).unwrap();
        let back = &exp(&l) - &identity_tensor(n, p);
        prop_assert!(rel(&back, &a) < 1e-10);
    }

    #[test]
    fn roots_raise_back((n, p, seed) in (1usize..4, 1usize..4, any::<u64>()), k in 2usize..4) {
        let a = &bounded_spectrum(&mut rng(seed), n, p, 0.5, 5.0) + &identity_tensor(n, p);
        let x = alpha_root(&a, c(k as f64), &TOL).unwrap();
        prop_assert!(rel(&tpow(&x, k).unwrap(), &a) < 1e-10);
        let half = named_tfunc(NamedFunction::AlphaPower(c(0.5)), &(&a - &identity_tensor(n, p))).unwrap();
        if k == 2 {
            prop_assert!(rel(&x, &half) < 1e-10);
        }
    }
}

#[test]
fn radius_is_enforced() {
    // Fourier blocks (2, 2).
    let a = tube(&[2.0, 0.0]);
    assert!(named_tfunc(NamedFunction::Log1p, &a).is_err());
    assert!(series_eval(|_| c(1.0), 1.0, &a, 10).is_err());
    assert!(named_tfunc(NamedFunction::Exp, &a).is_ok());
}

#[test]
fn exp_of_a_tube_is_blockwise_exp() {
    // Blocks (0, 2) map to (1, e^2); back in slices ((1 + e^2)/2, (1 - e^2)/2).
    let e2 = 2.0f64.exp();
    let want = tube(&[(1.0 + e2) / 2.0, (1.0 - e2) / 2.0]);
    assert!(rel(&exp(&tube(&[1.0, -1.0])), &want) < 1e-14);
}

#[test]
fn root_of_order_zero_is_a_domain_error() {
    assert!(alpha_root(&tube(&[1.0, 0.0]), c(0.0), &TOL).is_err());
}
