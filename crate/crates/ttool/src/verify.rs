//! Randomized comparisons of the Fourier-domain algorithms with the dense
//! block-circulant oracles.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use ttensor::fixtures::{self, Plant};
use ttensor::ginv::{t_drazin, t_moore_penrose};
use ttensor::oracle::{dense_drazin, dense_moore_penrose, dense_power_sums, dense_tfunc, dense_tprod, DenseFunction};
use ttensor::spectral::t_eigenvalues;
use ttensor::tfunc::{named_tfunc, tfunc_apply, NamedFunction};
use ttensor::{algebra::tprod, fro_norm, Result, Tensor3, Tolerances, C64};

/// Worst error of one comparison over all trials.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub trials: usize,
    pub max_error: f64,
    pub threshold: f64,
}

impl Check {
    fn new(name: &'static str, threshold: f64) -> Self {
        Self { name, trials: 0, max_error: 0.0, threshold }
    }

    fn record(&mut self, err: f64) {
        self.trials += 1;
        // NaN must fail the check.
        self.max_error = if err.is_nan() { f64::INFINITY } else { self.max_error.max(err) };
    }

    pub fn passed(&self) -> bool {
        self.max_error <= self.threshold
    }
}

/// Relative distance, absolute when `b` vanishes (nilpotent Drazin inputs).
fn rel(a: &Tensor3, b: &Tensor3) -> f64 {
    let d = fro_norm(&(a - b));
    let s = fro_norm(b);
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

/// Runs `trials` rounds on random `m x n x p` inputs (square-only checks are
/// skipped when `m != n`).
pub fn verify(m: usize, n: usize, p: usize, trials: usize, seed: u64, tol: &Tolerances) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prod = Check::new("tprod", 1e-10);
    let mut mp = Check::new("moore_penrose", 1e-8);
    let mut exp = Check::new("tfunc_exp", 1e-10);
    let mut sq = Check::new("tfunc_square", 1e-10);
    let mut eig = Check::new("eigenvalue_power_sums", 1e-9);
    let mut dr = Check::new("drazin", 1e-8);
    let square = m == n;
    for _ in 0..trials {
        let a = fixtures::random_tensor(&mut rng, m, n, p);
        let b = fixtures::random_tensor(&mut rng, n, m, p);
        prod.record(fro_norm(&(&tprod(&a, &b)? - &dense_tprod(&a, &b)?)) / (fro_norm(&a) * fro_norm(&b)));
        mp.record(rel(&t_moore_penrose(&a, tol)?.inverse, &dense_moore_penrose(&a)?));
        if !square {
            continue;
        }
        let s = a.scale(C64::new(1.0 / (n as f64).sqrt(), 0.0));
        exp.record(rel(&named_tfunc(NamedFunction::Exp, &s)?, &dense_tfunc(&s, &DenseFunction::Exp)?));
        sq.record(rel(&tfunc_apply(&a, |d| Ok(d.matmul(d)))?, &dense_tfunc(&a, &DenseFunction::Square)?));
        let ev = t_eigenvalues(&a)?.all();
        let count = 3;
        let dense = dense_power_sums(&a, count)?;
        for (j, want) in dense.iter().enumerate() {
            let got: C64 = ev.iter().map(|z| z.powu(j as u32 + 1)).sum();
            let scale: f64 = ev.iter().map(|z| z.norm().powi(j as i32 + 1)).sum::<f64>().max(1.0);
            eig.record((got - want).norm() / scale);
        }
        let k = fixtures::below(&mut rng, n.min(3) + 1);
        let f = fixtures::planted_jordan(&mut rng, n, p, &Plant { zero_index: k, ..Plant::default() });
        let x = t_drazin(&f.tensor, tol)?.inverse;
        dr.record(rel(&x, &dense_drazin(&f.tensor)?));
    }
    let mut out = vec![prod, mp];
    if square {
        out.extend([exp, sq, eig, dr]);
    }
    Ok(out)
}
