//! Wall-clock comparison of the Fourier path with the dense oracle path.

use std::fmt::Write as _;
use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ttensor::algebra::{tinv, tprod};
use ttensor::fixtures;
use ttensor::oracle::{dense_tfunc, dense_tinv, dense_tprod, DenseFunction, ORACLE_LIMIT};
use ttensor::tfunc::{named_tfunc, NamedFunction};
use ttensor::{identity_tensor, Result, Tolerances, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchOp {
    Tprod,
    Tinv,
    Exp,
}

impl BenchOp {
    pub fn name(self) -> &'static str {
        match self {
            BenchOp::Tprod => "tprod",
            BenchOp::Tinv => "tinv",
            BenchOp::Exp => "exp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [BenchOp::Tprod, BenchOp::Tinv, BenchOp::Exp].into_iter().find(|o| o.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub op: &'static str,
    pub n: usize,
    pub p: usize,
    pub path: &'static str,
    pub ms: f64,
}

/// Fastest of `reps` runs, in milliseconds.
fn best_ms<T>(reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<f64> {
    let mut best = f64::INFINITY;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        std::hint::black_box(f()?);
        best = best.min(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(best)
}

/// Times `op` on random `n x n x p` inputs along both paths. The dense
/// inverse and exponential are skipped above the oracle size limit; the
/// dense product has no limit.
pub fn bench_op(op: BenchOp, n: usize, p: usize, reps: usize, seed: u64) -> Result<Vec<BenchRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = fixtures::random_tensor(&mut rng, n, n, p);
    let row = |path, ms| BenchRow { op: op.name(), n, p, path, ms };
    let dense_ok = n * p <= ORACLE_LIMIT;
    let mut rows = Vec::new();
    match op {
        BenchOp::Tprod => {
            let b = fixtures::random_tensor(&mut rng, n, n, p);
            rows.push(row("fast", best_ms(reps, || tprod(&a, &b))?));
            rows.push(row("dense", best_ms(reps, || dense_tprod(&a, &b))?));
        }
        BenchOp::Tinv => {
            let shifted = &a + &identity_tensor(n, p).scale(C64::new(2.0 * n as f64, 0.0));
            let tol = Tolerances::DEFAULT;
            rows.push(row("fast", best_ms(reps, || tinv(&shifted, &tol))?));
            if dense_ok {
                rows.push(row("dense", best_ms(reps, || dense_tinv(&shifted))?));
            }
        }
        BenchOp::Exp => {
            let s = a.scale(C64::new(1.0 / (n as f64).sqrt(), 0.0));
            rows.push(row("fast", best_ms(reps, || named_tfunc(NamedFunction::Exp, &s))?));
            if dense_ok {
                rows.push(row("dense", best_ms(reps, || dense_tfunc(&s, &DenseFunction::Exp))?));
            }
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("op,n,p,path,ms\n");
    for r in rows {
        writeln!(s, "{},{},{},{},{:.3}", r.op, r.n, r.p, r.path, r.ms).expect("write to string");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let rows = bench_op(BenchOp::Tprod, 2, 3, 1, 0).unwrap();
        let csv = to_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "op,n,p,path,ms");
        assert!(lines[1].starts_with("tprod,2,3,fast,"));
        assert!(lines[2].starts_with("tprod,2,3,dense,"));
        assert_eq!(bench_op(BenchOp::Exp, 16, 8, 1, 0).unwrap().len(), 1);
        assert_eq!(BenchOp::parse("tinv"), Some(BenchOp::Tinv));
    }
}
