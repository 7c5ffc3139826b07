use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use hypersint::potential1::{P1Params, P1State};

const FIXTURE: [&str; 8] = ["--potential", "v1", "--alpha", "1", "--beta", "sqrt(2)/2", "--gamma", "2*sqrt(2)"];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypersint")).args(args).env_remove("HYPERSINT_SEED").output().unwrap()
}

fn fixture(cmd: &str, extra: &[&str]) -> Output {
    let mut a = vec![cmd];
    a.extend(FIXTURE);
    a.extend(extra);
    run(&a)
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn records(v: &Value) -> &Vec<Value> {
    v["records"].as_array().unwrap()
}

#[test]
fn spectrum_fixture() {
    let v = json(&fixture("spectrum", &[]));
    let r = records(&v);
    assert_eq!(r.len(), 3);
    for (rec, (e, deg)) in r.iter().zip([(-10.0, 1), (-3.0, 2), (0.0, 3)]) {
        assert!((rec["E"].as_f64().unwrap() - e).abs() < 1e-12);
        assert_eq!(rec["degeneracy"], deg);
    }
    assert_eq!(v["meta"]["command"], "spectrum");
}

#[test]
fn spectrum_other_charts() {
    let v = json(&fixture("spectrum", &["--chart", "horicyclic"]));
    let last = &records(&v)[2];
    let vals: Vec<f64> = last["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    // L2 eigenvalues 2γ² − 2√2β(2n1 + d + 1) with d = 3/2
    for (a, b) in vals.iter().zip([11.0, 7.0, 3.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    let v = json(&fixture("spectrum", &["--chart", "elliptic-parabolic"]));
    assert_eq!(records(&v)[1]["degeneracy"], 2);
}

#[test]
fn empty_spectrum() {
    let v = json(&run(&["spectrum", "--potential", "v1", "--alpha", "1", "--beta", "10", "--gamma", "1"]));
    let r = records(&v);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["labels"], "no bound states");
    assert_eq!(r[0]["degeneracy"], 0);
}

#[test]
fn second_potential_spectrum() {
    let v = json(&run(&["spectrum", "--potential", "v2", "--alpha", "0.1", "--beta", "3", "--gamma", "1"]));
    let r = records(&v);
    assert_eq!(r.len(), 1);
    assert!((r[0]["E"].as_f64().unwrap() + 1.565).abs() < 1e-3);
}

#[test]
fn invalid_parameters_exit_2() {
    let o = run(&["spectrum", "--potential", "v1", "--alpha", "0", "--beta", "1", "--gamma", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
    assert!(o.stdout.is_empty());
    let o = fixture("wavefunction", &["--quantum", "3,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mu - d - 2n - 1 > 0"));
    assert_eq!(fixture("spectrum", &["--chart", "semi-hyperbolic"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn wavefunction_grid() {
    let v = json(&fixture("wavefunction", &["--quantum", "0,0"]));
    let r = records(&v);
    assert_eq!(r.len(), 2500);
    assert_eq!(v["meta"]["energy"], -10);
    let p = P1Params::new(1.0, 2f64.sqrt() / 2.0, 2.0 * 2f64.sqrt()).unwrap();
    let s = P1State::equidistant(&p, 0, 0).unwrap();
    for rec in r.iter().step_by(97) {
        let (u1, u2) = (rec["u1"].as_f64().unwrap(), rec["u2"].as_f64().unwrap());
        let direct = s.eval_chart(u1, u2).unwrap();
        assert_eq!(rec["psi_re"].as_f64().unwrap().to_bits(), direct.to_bits());
        assert_eq!(rec["prob"].as_f64().unwrap().to_bits(), (direct * direct).to_bits());
    }
}

#[test]
fn wavefunction_csv_shape() {
    let o = fixture("wavefunction", &["--quantum", "1,0", "--grid", "3x4:0.1,1,-1,1", "--format", "csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "u1,u2,psi_re,psi_im,prob");
    assert_eq!(body.len(), 13);
    assert!(!text.contains('\r'));
}

#[test]
fn unreachable_residual_exit_3() {
    let o = run(&[
        "wavefunction",
        "--potential",
        "v1",
        "--alpha",
        "0.3",
        "--beta",
        "0.2",
        "--gamma",
        "3",
        "--chart",
        "elliptic-parabolic",
        "--quantum",
        "3,0",
        "--solver-tol",
        "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("best residual"));
}

#[test]
fn roots_fixture() {
    let v = json(&fixture("roots", &["--chart", "elliptic-parabolic", "--N", "1"]));
    let mut roots: Vec<f64> = records(&v).iter().map(|r| r["roots"][0].as_f64().unwrap()).collect();
    roots.sort_by(f64::total_cmp);
    let r35 = 35f64.sqrt();
    assert!((roots[0] - (7.0 - r35) / 2.0).abs() < 1e-10);
    assert!((roots[1] - (7.0 + r35) / 2.0).abs() < 1e-10);
    let v = json(&fixture("roots", &["--chart", "elliptic-parabolic", "--N", "1", "--system", "printed"]));
    let mut roots: Vec<f64> = records(&v).iter().map(|r| r["roots"][0].as_f64().unwrap()).collect();
    roots.sort_by(f64::total_cmp);
    let r59 = 59f64.sqrt();
    assert!((roots[0] - (3.0 - r59) / 2.0).abs() < 1e-10);
    assert!((roots[1] - (3.0 + r59) / 2.0).abs() < 1e-10);
}

#[test]
fn interbasis_command() {
    let v = json(&fixture("interbasis", &["--N", "2", "--method", "hahn"]));
    let r = records(&v);
    assert_eq!(r.len(), 9);
    assert!(r.iter().all(|x| x["diff_vs_quadrature"].as_f64().unwrap() <= 1e-8));
    let v = json(&fixture("interbasis", &["--N", "1"]));
    assert_eq!(records(&v).len(), 24);
}

#[test]
fn verify_suites() {
    let v = json(&fixture("verify", &["--suite", "interbasis"]));
    let r = records(&v);
    let agree: Vec<&Value> = r.iter().filter(|x| x["id"].as_str().unwrap().starts_with("three-method")).collect();
    assert_eq!(agree.len(), 3);
    assert!(agree.iter().all(|x| x["residual"].as_f64().unwrap() <= 1e-8 && x["pass"] == true));
    assert!(r.iter().any(|x| x["hard"] == false && x["pass"] == false));

    let v = json(&fixture("verify", &["--suite", "linear-relations"]));
    let ids: Vec<&str> = records(&v).iter().map(|x| x["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"linRel3") && ids.contains(&"linRel4"));

    let v = json(&run(&["verify", "--potential", "v2", "--alpha", "0.1", "--beta", "3", "--gamma", "1", "--suite", "eigen"]));
    let l1 = records(&v).iter().find(|x| x["id"] == "L1 n=0 m=0").unwrap();
    assert!(l1["pass"] == true && l1["notes"].as_str().unwrap().contains("eigenvalue 11.27"));

    let o = run(&["verify", "--potential", "v2", "--alpha", "0.1", "--beta", "3", "--gamma", "1", "--suite", "interbasis"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_hard_failure_exit_1() {
    // a coarse rule cannot reach the orthonormality tolerance
    let o = fixture("verify", &["--suite", "orthonormality", "--quad-level", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["meta"]["hard_failures"].as_u64().unwrap() > 0);
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# fixture\npotential=v1\nalpha=1\nbeta=sqrt(2)/2\ngamma=2*sqrt(2)\nformat=csv\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = run(&["spectrum", "--config", c]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("\n2,0,3,"));
    let o = run(&["spectrum", "--config", c, "--format", "json"]);
    assert!(serde_json::from_slice::<Value>(&o.stdout).is_ok());
    std::fs::write(&cfg, "colour=blue\n").unwrap();
    assert_eq!(run(&["spectrum", "--config", c]).status.code(), Some(2));
}

#[test]
fn out_file_is_atomic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spectrum.json");
    let o = out.to_str().unwrap();
    assert!(fixture("spectrum", &["--out", o]).status.success());
    let first = std::fs::read(&out).unwrap();
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(records(&v).len(), 3);
    // a failing run leaves the previous file untouched and no temporaries
    let bad = run(&["spectrum", "--potential", "v1", "--alpha", "-1", "--beta", "1", "--gamma", "1", "--out", o]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(std::fs::read(&out).unwrap(), first);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    assert!(Path::new(o).exists());
}

#[test]
fn identical_runs_identical_bytes() {
    for args in [
        vec!["spectrum", "--format", "csv"],
        vec!["roots", "--chart", "hyperbolic-parabolic", "--N", "2"],
        vec!["wavefunction", "--quantum", "1,1", "--grid", "7x5:0.2,2,-1,1"],
    ] {
        let a = fixture(args[0], &args[1..]);
        let b = fixture(args[0], &args[1..]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}
