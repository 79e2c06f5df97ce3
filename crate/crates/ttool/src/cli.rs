use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use ttensor::algebra::{tinv, tpow, tprod, tprod3};
use ttensor::decomp::{is_t_positive_definite, t_lu, t_polar, t_qr, t_schur, Definiteness};
use ttensor::ginv::{self, GinvReport, LimitOutcome};
use ttensor::polyn::{poly_residual, t_char_poly, t_min_poly, RootMultiset};
use ttensor::spectral::{jordan_factorize, t_eigenvalues};
use ttensor::tfunc::{alpha_root, named_tfunc, series_eval, NamedFunction};
use ttensor::transform::to_blocks;
use ttensor::{conj_transpose, fro_norm, identity_tensor, Tensor3, TensorError, Tolerances, C64};

use crate::bench::{bench_op, to_csv, BenchOp};
use crate::error::{exit, CliError};
use crate::io::{read_tensor, tensor_json, to_text, write_text};
use crate::report::{Report, Stopwatch};
use crate::verify::verify;

#[derive(Debug, Parser)]
#[command(name = "ttool", version, about = "T-product tensor algebra on JSON tensor files")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Accepted residual for generalized inverses and factorizations.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Result file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON report with residuals and the T-index.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Worker threads for per-block work (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FuncName {
    Exp,
    Sin,
    Cos,
    Log1p,
    /// `(I + a)^alpha`; with `--root`, the principal solution of `x^alpha = a`.
    Pow,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SeriesName {
    Exp,
    Sin,
    Cos,
    Log1p,
    Pow,
    /// `sum a^k`, radius 1.
    Geometric,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Input tensor file.
    #[arg(long)]
    pub a: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// T-product `a * b`.
    Tprod {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// T-inverse of an F-square tensor
    Tinv(Input),
    /// Nonnegative T-power
    Tpow {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        k: usize,
    },
    /// Conjugate transpose.
    Transpose(Input),
    /// Fourier blocks, stored as the slices of an n x n x p tensor.
    Blocks(Input),
    /// T-Jordan factorization.
    Jordan(Input),
    /// T-eigenvalues per Fourier block.
    Eig(Input),
    /// Standard T-function.
    Func {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        name: FuncName,
        /// Exponent for `pow`, `re` or `re,im`.
        #[arg(long, value_parser = parse_complex)]
        alpha: Option<C64>,
        /// With `pow`: solve `x^alpha = a` instead of evaluating `(I + a)^alpha`.
        #[arg(long)]
        root: bool,
    },
    /// Truncated power series.
    Series {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        name: SeriesName,
        #[arg(long, value_parser = parse_complex)]
        alpha: Option<C64>,
        #[arg(long, default_value_t = 25)]
        terms: usize,
    },
    /// Roots of the T-characteristic polynomial with multiplicities
    Charpoly(Input),
    /// Roots of the T-minimal polynomial
    Minpoly(Input),
    /// T-QR factorization
    Qr(Input),
    /// T-LU, partially pivoted unless `--no-pivot`
    Lu {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        no_pivot: bool,
    },
    /// Polar decomposition `u * h`
    Polar(Input),
    /// T-Schur form `q^H * t * q`
    Schur(Input),
    /// Definiteness of a Hermitian tensor.
    Posdef(Input),
    /// Moore-Penrose inverse.
    Pinv(Input),
    /// Group inverse (T-index at most 1).
    Group(Input),
    /// Drazin inverse
    Drazin {
        #[command(flatten)]
        input: Input,
        /// Also compare with `a^k (a^{2k+1})^+ a^k`.
        #[arg(long)]
        cross_check: bool,
    },
    /// T-index
    Index(Input),
    /// Numerical rank of bcirc(a)
    Rank(Input),
    /// Core-nilpotent decomposition.
    Corenil(Input),
    /// Resolvent limits: `(a^{l+1} + zI)^{-1} a^l`, or with `--m`/`--q`
    /// the nilpotent limit of `z^m (a + zI)^{-1} a^q`.
    Limit {
        #[command(flatten)]
        input: Input,
        /// Power in the Drazin resolvent; defaults to the T-index.
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        z_seq: Option<Vec<f64>>,
        #[arg(long, requires = "q")]
        m: Option<usize>,
        #[arg(long, requires = "m")]
        q: Option<usize>,
    },
    /// Fast path against the dense oracle on random inputs.
    Verify {
        /// `m x n x p`, e.g. `4x4x3`.
        #[arg(long, value_parser = parse_size)]
        size: [usize; 3],
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Timing of the fast and dense paths, CSV `op,n,p,path,ms`.
    Bench {
        /// Comma separated: tprod, tinv, exp.
        #[arg(long, value_delimiter = ',', default_value = "tprod")]
        ops: Vec<String>,
        /// Comma separated `n x p` pairs.
        #[arg(long, value_delimiter = ',', default_value = "8x8,32x64")]
        sizes: Vec<String>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err("expected `re` or `re,im`".into()),
    }
}

fn parse_dims<const K: usize>(s: &str) -> Result<[usize; K], String> {
    let v: Vec<usize> =
        s.split('x').map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"))).collect::<Result<_, _>>()?;
    let arr: [usize; K] = v.try_into().map_err(|_| format!("expected {K} dimensions separated by 'x'"))?;
    if arr.contains(&0) {
        return Err("dimensions must be positive".into());
    }
    Ok(arr)
}

fn parse_size(s: &str) -> Result<[usize; 3], String> {
    parse_dims::<3>(s)
}

/// What a command produces on `--out`.
enum Output {
    Tensor(Tensor3),
    Json(Value),
    Text(String),
}

struct Ctx {
    tol: Tolerances,
    seed: u64,
    report: Report,
    clock: Stopwatch,
    /// Set when a verification failed; the output is still written.
    failed: Option<String>,
}

fn rel(lhs: &Tensor3, rhs: &Tensor3) -> f64 {
    let s = fro_norm(rhs);
    let d = fro_norm(&(lhs - rhs));
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

fn c(z: C64) -> Value {
    json!([z.re, z.im])
}

fn roots_json(ms: &RootMultiset) -> Value {
    let roots: Vec<Value> = ms.roots().iter().map(|&(z, m)| json!({ "value": c(z), "multiplicity": m })).collect();
    let coeffs: Vec<Value> = ms.expand().into_iter().map(c).collect();
    json!({ "roots": roots, "degree": ms.degree(), "coefficients": coeffs })
}

fn tensors(pairs: &[(&str, &Tensor3)]) -> Value {
    Value::Object(pairs.iter().map(|(k, t)| ((*k).to_string(), tensor_json(t))).collect())
}

impl Ctx {
    fn gate(&self, what: &str, residual: f64, limit: f64) -> Result<(), CliError> {
        if residual <= limit {
            Ok(())
        } else {
            Err(TensorError::IllConditioned(format!("{what} residual {residual:.3e} exceeds {limit:.3e}")).into())
        }
    }

    fn ginv(&mut self, r: GinvReport) -> Result<Output, CliError> {
        self.report.extend(&r.residuals);
        self.report.t_index = r.t_index;
        self.gate("generalized inverse", r.max_residual(), self.tol.ginv)?;
        Ok(Output::Tensor(r.inverse))
    }

    fn reconstruction(&mut self, back: &Tensor3, a: &Tensor3) -> Result<(), CliError> {
        let r = rel(back, a);
        self.report.residual("reconstruction", r);
        self.gate("factorization", r, self.tol.decomp)
    }
}

fn named(name: FuncName, alpha: Option<C64>) -> Result<NamedFunction, CliError> {
    Ok(match name {
        FuncName::Exp => NamedFunction::Exp,
        FuncName::Sin => NamedFunction::Sin,
        FuncName::Cos => NamedFunction::Cos,
        FuncName::Log1p => NamedFunction::Log1p,
        FuncName::Pow => NamedFunction::AlphaPower(alpha.ok_or_else(|| CliError::Usage("pow needs --alpha".into()))?),
    })
}

fn execute(cmd: Command, ctx: &mut Ctx) -> Result<Output, CliError> {
    let tol = ctx.tol;
    let load = |p: &Path, clock: &mut Stopwatch| clock.time("read", || read_tensor(p));
    Ok(match cmd {
        Command::Tprod { a, b } => {
            let (a, b) = (load(&a, &mut ctx.clock)?, load(&b, &mut ctx.clock)?);
            Output::Tensor(ctx.clock.time("compute", || tprod(&a, &b))?)
        }
        Command::Tinv(i) => {
            let a = load(&i.a, &mut ctx.clock)?;
            let x = ctx.clock.time("compute", || tinv(&a, &tol))?;
            let id = identity_tensor(a.n_rows(), a.n_slices());
            ctx.report.residual("ax", rel(&tprod(&a, &x)?, &id));
            ctx.report.residual("xa", rel(&tprod(&x, &a)?, &id));
            Output::Tensor(x)
        }
        Command::Tpow { input, k } => {
            let a = load(&input.a, &mut ctx.clock)?;
            Output::Tensor(ctx.clock.time("compute", || tpow(&a, k))?)
        }
        Command::Transpose(i) => Output::Tensor(conj_transpose(&load(&i.a, &mut ctx.clock)?)),
        Command::Blocks(i) => {
            let a = load(&i.a, &mut ctx.clock)?;
            let b = ctx.clock.time("compute", || to_blocks(&a))?;
            Output::Tensor(Tensor3::from_slices(b.blocks())?)
        }
        Command::Jordan(i) => {
            let a = load(&i.a, &mut ctx.clock)?;
            let f = ctx.clock.time("compute", || jordan_factorize(&a, &tol))?;
            let r = rel(&f.reconstruct(), &a);
            ctx.report.residual("reconstruction", r);
            ctx.gate("Jordan factorization", r, tol.jordan)?;
            let structure: Vec<Value> = f
                .block_structure
                .iter()
                .map(|bs| {
                    Value::Array(bs.iter().map(|b| json!({ "eigenvalue": c(b.eigenvalue), "size": b.size })).collect())
                })
                .collect();
            let mut v = tensors(&[("p", &f.p_tensor), ("p_inv", &f.p_inv), ("j", &f.j_tensor)]);
            v["structure"] = Value::Array(structure);
            Output::Json(v)
        }
        Command::Eig(i) => {
            let a = load(&i.a, &mut ctx.clock)?;
            let ev = ctx.clock.time("compute", || t_eigenvalues(&a))?;
            let per: Vec<Value> =
                ev.per_block().iter().map(|b| Value::Array(b.iter().map(|&z| c(z)).collect())).collect();
            Output::Json(json!({ "eigenvalues": per }))
        }
        Command::Func { input, name, alpha, root } => {
            let a = load(&input.a, &mut ctx.clock)?;
            let f = if root {
                if !matches!(name, FuncName::Pow) {
                    return Err(CliError::Usage("--root applies to pow only".into()));
                }
                let alpha = alpha.ok_or_else(|| CliError::Usage("pow needs --alpha".into()))?;
                ctx.clock.time("compute", || alpha_root(&a, alpha, &tol))?
            } else {
                let nf = named(name, alpha)?;
                ctx.clock.time("compute", || named_tfunc(nf, &a))?
            };
            let comm = fro_norm(&(&tprod(&f, &a)? - &tprod(&a, &f)?));
            let scale = fro_norm(&f) * fro_norm(&a);
            ctx.report.residual("commutator", if scale > 0.0 { comm / scale } else { comm });
            Output::Tensor(f)
        }
        Command::Series { input, name, alpha, terms } => {
            let a = load(&input.a, &mut ctx.clock)?;
            let s = match name {
                SeriesName::Geometric => {
                    ctx.clock.time("compute", || series_eval(|_| C64::new(1.0, 0.0), 1.0, &a, terms))?
                }
                other => {
                    let fname = match other {
                        SeriesName::Exp => FuncName::Exp,
                        SeriesName::Sin => FuncName::Sin,
                        SeriesName::Cos => FuncName::Cos,
                        SeriesName::Log1p => FuncName::Log1p,
                        _ => FuncName::Pow,
                    };
                    let nf = named(fname, alpha)?;
                    ctx.clock.time("compute", || series_eval(|k| nf.coefficient(k), nf.radius(), &a, terms))?
                }
            };
            ctx.report.residual("tail_estimate", s.tail_estimate);
            Output::Tensor(s.value)
        }
        Command::Charpoly(i) => poly_command(&i, ctx, t_char_poly)?,
        Command::Minpoly(i) => poly_command(&i, ctx, t_min_poly)?,
        Command::Qr(i) => {
            let a = load(&i.a, &mut ctx.clock)?;
            let f = ctx.clock.time("compute", || t_qr(&a))?;
            ctx.reconstruction(&tprod(&f.q, &f.r)?, &a)?;
            Output::Json(tensors(&[("q", &f.q), ("r", &f.r)]))
        }
        Command::Lu { input, no_pivot } => {
            let a = load(&input.a, &mut ctx.clock)?;
            let f = ctx.clock.time("compute", || t_lu(&a, !no_pivot, &tol))?;
            let lu = tprod(&f.l, &f.u)?;
            match &f.perm {
                Some(p) => {
                    ctx.reconstruction(&lu, &tprod(p, &a)?)?;
                    Output::Json(tensors(&[("perm", p), ("l", &f.l), ("u", &f.u)]))
                }
                None => {
                    ctx.reconstruction(&lu, &a)?;
                    Output::Json(tensors(&[("l", &f.l), ("u", &f.u)]))
                }
            }
        }
        Command::Polar(i) => {
            let a = load(&i.a, &mut ctx.clock)?;
            let f = ctx.clock.time("compute", || t_polar(&a))?;
            ctx.reconstruction(&tprod(&f.u, &f.h)?, &a)?;
            Output::Json(tensors(&[("u", &f.u), ("h", &f.h)]))
        }
        Command::Schur(i) => {
            let a = load(&i.a, &mut ctx.clock)?;
            let f = ctx.clock.time("compute", || t_schur(&a))?;
            ctx.reconstruction(&tprod3(&conj_transpose(&f.q), &f.t, &f.q)?, &a)?;
            Output::Json(tensors(&[("q", &f.q), ("t", &f.t)]))
        }
        Command::Posdef(i) => {
            let a = load(&i.a, &mut ctx.clock)?;
            let d = ctx.clock.time("compute", || is_t_positive_definite(&a, &tol))?;
            let name = match d {
                Definiteness::Definite => "definite",
                Definiteness::Semidefinite => "semidefinite",
                Definiteness::Indefinite => "indefinite",
            };
            Output::Json(json!({ "definiteness": name }))
        }
        Command::Pinv(i) => {
            let a = load(&i.a, &mut ctx.clock)?;
            let r = ctx.clock.time("compute", || ginv::t_moore_penrose(&a, &tol))?;
            ctx.ginv(r)?
        }
        Command::Group(i) => {
            let a = load(&i.a, &mut ctx.clock)?;
            let r = ctx.clock.time("compute", || ginv::t_group_inverse(&a, &tol))?;
            ctx.ginv(r)?
        }
        Command::Drazin { input, cross_check } => {
            let a = load(&input.a, &mut ctx.clock)?;
            let r = ctx.clock.time("compute", || ginv::t_drazin_with(&a, &tol, cross_check))?;
            ctx.ginv(r)?
        }
        Command::Index(i) => {
            let a = load(&i.a, &mut ctx.clock)?;
            let k = ctx.clock.time("compute", || ginv::t_index(&a, &tol))?;
            ctx.report.t_index = Some(k);
            Output::Json(json!({ "t_index": k }))
        }
        Command::Rank(i) => {
            let a = load(&i.a, &mut ctx.clock)?;
            Output::Json(json!({ "t_rank": ctx.clock.time("compute", || ginv::t_rank(&a, &tol)) }))
        }
        Command::Corenil(i) => {
            let a = load(&i.a, &mut ctx.clock)?;
            let cn = ctx.clock.time("compute", || ginv::core_nilpotent(&a, &tol))?;
            let s = fro_norm(&a).powi(2).max(f64::MIN_POSITIVE);
            ctx.report.residual("core_nilpotent", fro_norm(&tprod(&cn.core, &cn.nilpotent)?) / s);
            ctx.report.residual("nilpotent_core", fro_norm(&tprod(&cn.nilpotent, &cn.core)?) / s);
            ctx.report.t_index = Some(cn.t_index);
            let mut v = tensors(&[("core", &cn.core), ("nilpotent", &cn.nilpotent)]);
            v["t_index"] = json!(cn.t_index);
            Output::Json(v)
        }
        Command::Limit { input, l, z_seq, m, q } => {
            let a = load(&input.a, &mut ctx.clock)?;
            if let (Some(m), Some(q)) = (m, q) {
                let zs = z_seq.unwrap_or_else(ginv::default_nilpotent_z);
                let r = ctx.clock.time("compute", || ginv::nilpotent_limit(&a, m, q, &zs))?;
                for (k, d) in r.differences.iter().enumerate() {
                    ctx.report.residual(format!("difference_{k:02}"), *d);
                }
                return Ok(Output::Json(match r.outcome {
                    LimitOutcome::Diverges => json!({ "converges": false }),
                    LimitOutcome::Converges(v) => json!({ "converges": true, "limit": tensor_json(&v) }),
                }));
            }
            let k = ginv::t_index(&a, &tol)?;
            let l = l.unwrap_or(k);
            let zs = z_seq.unwrap_or_else(|| ginv::DEFAULT_DRAZIN_Z.to_vec());
            let r = ctx.clock.time("compute", || ginv::drazin_limit(&a, l, &zs, &tol))?;
            for (z, e) in r.z.iter().zip(&r.errors) {
                ctx.report.residual(format!("error_z={z:e}"), *e);
            }
            ctx.report.t_index = Some(k);
            Output::Tensor(r.limit_estimate().clone())
        }
        Command::Verify { size: [m, n, p], trials } => {
            let checks = ctx.clock.time("compute", || verify(m, n, p, trials, ctx.seed, &tol))?;
            let mut lines = String::new();
            for ch in &checks {
                ctx.report.residual(ch.name, ch.max_error);
                lines.push_str(&format!(
                    "{:<24} {:>5} trials  max error {:.3e}  threshold {:.0e}  {}\n",
                    ch.name,
                    ch.trials,
                    ch.max_error,
                    ch.threshold,
                    if ch.passed() { "ok" } else { "FAIL" }
                ));
            }
            let bad: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
            if !bad.is_empty() {
                ctx.failed = Some(bad.join(", "));
            }
            Output::Text(lines)
        }
        Command::Bench { ops, sizes, reps } => {
            let mut rows = Vec::new();
            for op in &ops {
                let op = BenchOp::parse(op).ok_or_else(|| CliError::Usage(format!("unknown bench op {op:?}")))?;
                for s in &sizes {
                    let [n, p] = parse_dims::<2>(s).map_err(CliError::Usage)?;
                    rows.extend(bench_op(op, n, p, reps, ctx.seed)?);
                }
            }
            Output::Text(to_csv(&rows))
        }
    })
}

fn poly_command(
    i: &Input,
    ctx: &mut Ctx,
    f: fn(&Tensor3, &Tolerances) -> ttensor::Result<RootMultiset>,
) -> Result<Output, CliError> {
    let a = ctx.clock.time("read", || read_tensor(&i.a))?;
    let tol = ctx.tol;
    let ms = ctx.clock.time("compute", || f(&a, &tol))?;
    ctx.report.residual("polynomial", poly_residual(&ms, &a)?);
    Ok(Output::Json(roots_json(&ms)))
}

fn emit(out: Option<&Path>, output: Output) -> Result<(), CliError> {
    let text = match output {
        Output::Tensor(t) => to_text(&tensor_json(&t)),
        Output::Json(v) => to_text(&v),
        Output::Text(s) => s,
    };
    match out {
        Some(p) => write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let Global { tol, seed, out, report, timings, .. } = cli.global;
    let mut tolerances = Tolerances::DEFAULT;
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        tolerances.ginv = t;
        tolerances.decomp = t;
    }
    let mut ctx =
        Ctx { tol: tolerances, seed, report: Report::default(), clock: Stopwatch::new(timings), failed: None };
    let output = execute(cli.command, &mut ctx)?;
    emit(out.as_deref(), output)?;
    if let Some(path) = &report {
        let mut r = ctx.report;
        r.timings_ms = ctx.clock.finish();
        write_text(path, &to_text(&serde_json::to_value(&r).expect("report serializes")))?;
    }
    match ctx.failed {
        Some(what) => Err(CliError::Verify(what)),
        None => Ok(exit::OK),
    }
}

/// Parses `args` (program name first) and runs one command. Returns the
/// process exit code; diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.global.threads;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build();
    let result = match pool {
        Ok(pool) => pool.install(|| dispatch(cli)),
        Err(e) => Err(CliError::Usage(format!("thread pool: {e}"))),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_parsers() {
        assert_eq!(parse_complex("0.5").unwrap(), C64::new(0.5, 0.0));
        assert_eq!(parse_complex("1,-2").unwrap(), C64::new(1.0, -2.0));
        assert!(parse_complex("1,2,3").is_err());
        assert_eq!(parse_size("4x4x3").unwrap(), [4, 4, 3]);
        assert!(parse_size("4x4").is_err());
        assert!(parse_size("0x1x1").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
