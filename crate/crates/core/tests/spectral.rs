mod common;

use common::{c, multiset_distance, rel, rng, tube};
use proptest::prelude::*;
use ttensor::algebra::{has_structure, tinv, tprod3, Structure};
use ttensor::decomp::t_schur;
use ttensor::fixtures::{
    commuting_pair, conditioned_tensor, hermitian_with_spectrum, nilpotent, planted_jordan, random_real_tensor,
    random_tensor, same_structure, unitary_tensor, Plant,
};
use ttensor::polyn::{poly_residual, t_char_poly, t_min_poly};
use ttensor::spectral::{
    is_f_diagonalizable, jordan_factorize, jordan_structure, nilpotency, simultaneous_diagonalize, t_eigenvalues,
    Nilpotency,
};
use ttensor::transform::to_blocks;
use ttensor::{fro_norm, Tensor3, Tolerances, C64};

const TOL: Tolerances = Tolerances::DEFAULT;

fn plant(zero_index: usize, distinct: usize) -> Plant {
    Plant { zero_index, distinct, cond: 50.0, ..Plant::default() }
}

proptest! {
    #![proptest_config(common::config(48))]

    #[test]
    fn planted_structure_is_recovered(
        (n, p, seed) in (1usize..6, 1usize..5, any::<u64>()),
        distinct in 1usize..4,
        zero in 0usize..3,
    ) {
        let f = planted_jordan(&mut rng(seed), n, p, &plant(zero.min(n), distinct));
        let j = jordan_factorize(&f.tensor, &TOL).unwrap();
        prop_assert!(rel(&j.reconstruct(), &f.tensor) < TOL.jordan);
        for (i, want) in f.structure.iter().enumerate() {
            prop_assert!(same_structure(&j.block_structure[i], want, 1e-5), "block {i}: {:?} vs {want:?}", j.block_structure[i]);
        }
        prop_assert!(rel(&tprod3(&j.p_tensor, &j.p_inv, &ttensor::identity_tensor(n, p)).unwrap(), &ttensor::identity_tensor(n, p)) < 1e-9);
    }

    #[test]
    fn eigenvalues_are_similarity_invariant((n, p, seed) in (1usize..6, 1usize..5, any::<u64>())) {
        let mut g = rng(seed);
        let a = random_tensor(&mut g, n, n, p);
        let t = conditioned_tensor(&mut g, n, p, 10.0);
        let b = tprod3(&tinv(&t, &TOL).unwrap(), &a, &t).unwrap();
        let (ea, eb) = (t_eigenvalues(&a).unwrap(), t_eigenvalues(&b).unwrap());
        let scale = to_blocks(&a).unwrap().max_block_norm();
        for i in 0..p {
            prop_assert!(multiset_distance(ea.block(i), eb.block(i)) < 1e-8 * scale);
        }
    }

    #[test]
    fn real_tensors_have_conjugate_spectra((n, p, seed) in (1usize..6, 1usize..7, any::<u64>())) {
        let a = random_real_tensor(&mut rng(seed), n, n, p);
        let ev = t_eigenvalues(&a).unwrap();
        let scale = to_blocks(&a).unwrap().max_block_norm().max(1.0);
        for i in 0..p {
            let mirror: Vec<C64> = ev.block((p - i) % p).iter().map(|z| z.conj()).collect();
            prop_assert!(multiset_distance(ev.block(i), &mirror) < 1e-9 * scale);
        }
    }

    #[test]
    fn structured_tensors_have_structured_spectra((n, p, seed) in (1usize..5, 1usize..5, any::<u64>())) {
        let mut g = rng(seed);
        let h = hermitian_with_spectrum(&mut g, n, p, -2.0, 3.0);
        prop_assert!(has_structure(&h, Structure::Hermitian, &TOL).unwrap());
        for z in t_eigenvalues(&h).unwrap().all() {
            prop_assert!(z.im.abs() < 1e-10 && z.re > -2.0 - 1e-9 && z.re < 3.0 + 1e-9);
        }
        let u = unitary_tensor(&mut g, n, p);
        for z in t_eigenvalues(&u).unwrap().all() {
            prop_assert!((z.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn schur_form_is_upper_and_unitary((n, p, seed) in (1usize..5, 1usize..5, any::<u64>())) {
        let a = random_tensor(&mut rng(seed), n, n, p);
        let s = t_schur(&a).unwrap();
        prop_assert!(has_structure(&s.q, Structure::Unitary, &TOL).unwrap());
        prop_assert!(has_structure(&s.t, Structure::FUpper, &TOL).unwrap());
        let back = tprod3(&ttensor::conj_transpose(&s.q), &s.t, &s.q).unwrap();
        prop_assert!(rel(&back, &a) < 1e-12);
        let ev = t_eigenvalues(&a).unwrap();
        let tb = to_blocks(&s.t).unwrap();
        for i in 0..p {
            prop_assert!(multiset_distance(ev.block(i), &tb.block(i).diag()) < 1e-10);
        }
    }

    #[test]
    fn min_poly_divides_char_poly(
        (n, p, seed) in (1usize..6, 1usize..4, any::<u64>()),
        distinct in 1usize..4,
        zero in 0usize..3,
    ) {
        let f = planted_jordan(&mut rng(seed), n, p, &plant(zero.min(n), distinct));
        let ch = t_char_poly(&f.tensor, &TOL).unwrap();
        let mn = t_min_poly(&f.tensor, &TOL).unwrap();
        prop_assert!(ch.degree() >= n && ch.degree() <= n * p);
        prop_assert!(mn.degree() <= ch.degree());
        for &(z, m) in mn.roots() {
            prop_assert!(m <= ch.multiplicity_near(z, 1e-6), "{z} x{m}");
        }
        let scale = fro_norm(&f.tensor).max(1.0).powi(ch.degree() as i32);
        prop_assert!(poly_residual(&ch, &f.tensor).unwrap() < 1e-6 * scale);
        prop_assert!(poly_residual(&mn, &f.tensor).unwrap() < 1e-6 * scale);
        let diag = is_f_diagonalizable(&f.tensor, &TOL).unwrap();
        prop_assert_eq!(diag, mn.roots().iter().all(|r| r.1 == 1));
        prop_assert_eq!(diag, f.structure.iter().flatten().all(|b| b.size == 1));
    }

    #[test]
    fn nilpotent_fixtures_report_their_index((n, p, seed) in (1usize..5, 1usize..4, any::<u64>()), k in 1usize..5) {
        let k = k.min(n);
        let f = nilpotent(&mut rng(seed), n, p, k, 5.0);
        prop_assert_eq!(nilpotency(&f.tensor, &TOL).unwrap(), Nilpotency::Nilpotent(k));
        for z in t_char_poly(&f.tensor, &TOL).unwrap().roots() {
            prop_assert!(z.0.norm() < 1e-9);
        }
    }

    #[test]
    fn commuting_pairs_diagonalize_together((n, p, seed) in (1usize..5, 1usize..4, any::<u64>())) {
        let (a, b) = commuting_pair(&mut rng(seed), n, p, 2, 1.0);
        let sd = simultaneous_diagonalize(&[a.clone(), b.clone()], &TOL).unwrap();
        for (d, orig) in sd.diagonals.iter().zip([&a, &b]) {
            prop_assert!(has_structure(d, Structure::FDiagonal, &TOL).unwrap());
            prop_assert!(rel(&tprod3(&sd.p_inv, d, &sd.p_tensor).unwrap(), orig) < 1e-7);
        }
    }
}

#[test]
fn tube_spectrum_is_the_tube_transform() {
    // Tube (1, -1) has Fourier blocks (0, 2).
    let a = tube(&[1.0, -1.0]);
    let ev = t_eigenvalues(&a).unwrap();
    assert!((ev.block(0)[0] - c(0.0)).norm() < 1e-15);
    assert!((ev.block(1)[0] - c(2.0)).norm() < 1e-15);
    // The LCM over blocks has degree two for a 1x1 tensor.
    let ch = t_char_poly(&a, &TOL).unwrap();
    assert_eq!(ch.degree(), 2);
    assert!(poly_residual(&ch, &a).unwrap() < 1e-14);
}

#[test]
fn jordan_block_in_one_slice() {
    let a = Tensor3::from_real(2, 2, 1, &[3.0, 1.0, 0.0, 3.0]).unwrap();
    let s = jordan_structure(&a, &TOL).unwrap();
    assert_eq!(s[0].len(), 1);
    assert_eq!(s[0][0].size, 2);
    assert!((s[0][0].eigenvalue - c(3.0)).norm() < 1e-12);
    assert!(!is_f_diagonalizable(&a, &TOL).unwrap());
    let mn = t_min_poly(&a, &TOL).unwrap();
    assert_eq!(mn.roots().len(), 1);
    assert_eq!(mn.roots()[0].1, 2);
}

#[test]
fn non_commuting_family_is_rejected() {
    let a = Tensor3::from_real(2, 2, 1, &[1.0, 1.0, 0.0, 2.0]).unwrap();
    let b = Tensor3::from_real(2, 2, 1, &[1.0, 0.0, 1.0, 2.0]).unwrap();
    assert!(simultaneous_diagonalize(&[a, b], &TOL).is_err());
}
