use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use tempfile::TempDir;
use ttensor::{Tensor3, C64};
use ttool::io::{read_tensor, write_tensor};
use ttool::{exit, CliError};

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn tensor(&self, name: &str, t: &Tensor3) -> PathBuf {
        let p = self.path(name);
        write_tensor(&p, t).unwrap();
        p
    }

    fn text(&self, name: &str, body: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, body).unwrap();
        p
    }
}

fn run(args: &[&str]) -> i32 {
    ttool::run(std::iter::once("ttool").chain(args.iter().copied()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn tube(v: &[f64]) -> Tensor3 {
    Tensor3::from_real(1, 1, v.len(), v).unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn close(z: C64, re: f64, im: f64) -> bool {
    (z - C64::new(re, im)).norm() < 1e-12
}

#[test]
fn tprod_writes_the_product() {
    let d = Dir::new();
    // Circular convolution of tubes: (1, 2) * (3, 4) = (1*3 + 2*4, 1*4 + 2*3).
    let a = d.tensor("a.json", &tube(&[1.0, 2.0]));
    let b = d.tensor("b.json", &tube(&[3.0, 4.0]));
    let c = d.path("c.json");
    assert_eq!(run(&["tprod", "--a", s(&a), "--b", s(&b), "--out", s(&c)]), exit::OK);
    let t = read_tensor(&c).unwrap();
    assert_eq!(t.shape(), [1, 1, 2]);
    assert!(close(t.get(0, 0, 0), 11.0, 0.0));
    assert!(close(t.get(0, 0, 1), 10.0, 0.0));
}

#[test]
fn drazin_reports_residuals_and_index() {
    let d = Dir::new();
    // Fourier blocks (0, 2): the Drazin inverse has blocks (0, 1/2).
    let a = d.tensor("a.json", &tube(&[1.0, -1.0]));
    let (out, rep) = (d.path("d.json"), d.path("r.json"));
    assert_eq!(run(&["drazin", "--a", s(&a), "--out", s(&out), "--report", s(&rep)]), exit::OK);
    let x = read_tensor(&out).unwrap();
    assert!(close(x.get(0, 0, 0), 0.25, 0.0));
    assert!(close(x.get(0, 0, 1), -0.25, 0.0));
    let r = json(&rep);
    assert_eq!(r["t_index"], 1);
    let res = r["residuals"].as_object().unwrap();
    for key in ["akxa", "xax", "commute"] {
        assert!(res[key].as_f64().unwrap() < 1e-12, "{key}");
    }
    assert!(r.get("timings_ms").is_none());
}

#[test]
fn verify_mode_passes() {
    let d = Dir::new();
    let out = d.path("v.txt");
    assert_eq!(run(&["verify", "--size", "4x4x3", "--trials", "100", "--seed", "7", "--out", s(&out)]), exit::OK);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().count() >= 6);
    assert!(text.lines().all(|l| l.ends_with("ok")), "{text}");
}

#[test]
fn multi_output_layout() {
    let d = Dir::new();
    let a = d.tensor("a.json", &Tensor3::from_real(2, 2, 2, &[2.0, 1.0, 0.0, 3.0, 0.5, 0.0, 1.0, -0.5]).unwrap());
    let out = d.path("qr.json");
    assert_eq!(run(&["qr", "--a", s(&a), "--out", s(&out)]), exit::OK);
    let v = json(&out);
    assert_eq!(v["q"]["shape"], serde_json::json!([2, 2, 2]));
    assert_eq!(v["r"]["data"].as_array().unwrap().len(), 8);
    let out = d.path("cn.json");
    assert_eq!(run(&["corenil", "--a", s(&a), "--out", s(&out)]), exit::OK);
    let v = json(&out);
    assert!(v["core"].is_object() && v["nilpotent"].is_object());
}

#[test]
fn identical_runs_give_identical_bytes() {
    let d = Dir::new();
    let a = d.tensor(
        "a.json",
        &Tensor3::from_real(2, 2, 3, &[1.0, 2.0, 0.0, 1.0, 0.5, 0.0, 0.0, 2.0, 1.0, 1.0, 0.0, 0.0]).unwrap(),
    );
    let mut outputs = Vec::new();
    for tag in ["1", "2"] {
        let (out, rep) = (d.path(&format!("j{tag}.json")), d.path(&format!("r{tag}.json")));
        assert_eq!(run(&["jordan", "--a", s(&a), "--out", s(&out), "--report", s(&rep)]), exit::OK);
        let v = d.path(&format!("v{tag}.txt"));
        assert_eq!(run(&["verify", "--size", "2x3x2", "--trials", "5", "--seed", "3", "--out", s(&v)]), exit::OK);
        outputs.push([fs::read(&out).unwrap(), fs::read(&rep).unwrap(), fs::read(&v).unwrap()]);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn input_errors_exit_2() {
    let d = Dir::new();
    let missing = d.path("missing.json");
    assert_eq!(run(&["tinv", "--a", s(&missing)]), exit::INPUT);
    let short = d.text("short.json", r#"{"shape":[1,1,2],"data":[[1,0]]}"#);
    assert_eq!(run(&["tinv", "--a", s(&short)]), exit::INPUT);
    let garbage = d.text("bad.json", "not json");
    assert_eq!(run(&["tinv", "--a", s(&garbage)]), exit::INPUT);
    assert_eq!(run(&["no-such-command"]), exit::INPUT);
    assert_eq!(run(&["--help"]), exit::OK);
}

#[test]
fn shape_mismatch_exits_3() {
    let d = Dir::new();
    let a = d.tensor("a.json", &Tensor3::zeros(2, 3, 2));
    let b = d.tensor("b.json", &Tensor3::zeros(2, 3, 2));
    assert_eq!(run(&["tprod", "--a", s(&a), "--b", s(&b), "--out", s(&d.path("c.json"))]), exit::SHAPE);
    assert_eq!(run(&["tinv", "--a", s(&a)]), exit::SHAPE);
}

#[test]
fn singular_and_index_errors_exit_4() {
    let d = Dir::new();
    // Blocks (2, 0).
    let a = d.tensor("a.json", &tube(&[1.0, 1.0]));
    assert_eq!(run(&["tinv", "--a", s(&a)]), exit::SINGULAR);
    let nil = d.tensor("n.json", &Tensor3::from_real(2, 2, 1, &[0.0, 1.0, 0.0, 0.0]).unwrap());
    assert_eq!(run(&["group", "--a", s(&nil)]), exit::SINGULAR);
    // Fourier blocks I and [[0, 1], [1, 0]]: zero leading minor in block 2.
    let swap = Tensor3::from_real(2, 2, 2, &[0.5, 0.5, 0.5, 0.5, 0.5, -0.5, -0.5, 0.5]).unwrap();
    let p = d.tensor("p.json", &swap);
    assert_eq!(run(&["lu", "--a", s(&p), "--no-pivot", "--out", s(&d.path("lu.json"))]), exit::SINGULAR);
    assert_eq!(run(&["lu", "--a", s(&p), "--out", s(&d.path("lu.json"))]), exit::OK);
}

#[test]
fn radius_violation_exits_5() {
    let d = Dir::new();
    // Blocks (2, 2): outside the unit disc of log1p.
    let a = d.tensor("a.json", &tube(&[2.0, 0.0]));
    assert_eq!(run(&["func", "--a", s(&a), "--name", "log1p"]), exit::RADIUS);
    assert_eq!(run(&["series", "--a", s(&a), "--name", "geometric"]), exit::RADIUS);
}

#[test]
fn residual_gate_exits_6() {
    let d = Dir::new();
    let a = d.tensor("a.json", &Tensor3::from_real(2, 2, 1, &[1.0, 2.0, 3.0, 4.0]).unwrap());
    let out = d.path("x.json");
    assert_eq!(run(&["pinv", "--a", s(&a), "--out", s(&out)]), exit::OK);
    assert_eq!(run(&["qr", "--a", s(&a), "--tol", "1e-300", "--out", s(&out)]), exit::ILL_CONDITIONED);
}

#[test]
fn verification_failure_code() {
    assert_eq!(CliError::Verify("tprod".into()).exit_code(), exit::VERIFY);
}
