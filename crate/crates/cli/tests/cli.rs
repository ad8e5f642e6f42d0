use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use sphconv::transform::hc_value;
use sphconv::{QuadratureSpec, RadialProfile, SpectralParam};

fn sphconv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphconv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn transform_table() {
    let o = sphconv(&["transform", "--profile", "gaussian:1", "--lambda", "0:10:101"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lambda_re,lambda_im,value_re,value_im,error,warnings");
    assert_eq!(lines.len(), 102);
    let first: Vec<&str> = lines[1].split(',').collect();
    let v: f64 = first[2].parse().unwrap();
    let f = RadialProfile::gaussian(1.0).unwrap();
    let direct = hc_value(&f, SpectralParam::ZERO, &QuadratureSpec::default()).unwrap();
    assert_eq!(v, direct.re);
}

#[test]
fn transform_is_deterministic() {
    let args = ["transform", "--profile", "cauchy_decay:4", "--lambda", "-2:2:9:0.5"];
    assert_eq!(sphconv(&args).stdout, sphconv(&args).stdout);
}

#[test]
fn inversion_round_trip() {
    let o = sphconv(&["invert", "--profile", "gaussian:1", "--t", "0:3:31"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,value,exact,abs_error,warnings"));
    let errors: Vec<f64> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(errors.len(), 31);
    assert!(errors.iter().all(|e| *e <= 1e-4), "{errors:?}");
}

#[test]
fn verify_spherical_passes() {
    let o = sphconv(&["verify", "spherical"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("check_id,paper_ref,value,bound,margin,pass"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 6);
    assert!(rows.iter().all(|r| r.split(',').nth(5) == Some("true")));
}

#[test]
fn config_file_with_flag_override() {
    let cfg = scratch("run.conf");
    let out = scratch("from_config.csv");
    fs::write(
        &cfg,
        format!(
            "# transform table\ncommand = transform\nprofile = gaussian:2\nlambda = 0:1:3\nquad = k_nodes=256\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = sphconv(&["--config", cfg.to_str().unwrap(), "--lambda", "0:1:5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 6);
    let direct = sphconv(&["transform", "--profile", "gaussian:2", "--lambda", "0:1:5"]);
    assert_eq!(direct.stdout, text.as_bytes());
}

#[test]
fn eval_and_convolve_schemas() {
    let o = sphconv(&["eval", "--lambda", "0:1:2", "--t", "0:1:2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 5);
    let o = sphconv(&[
        "convolve",
        "--profile",
        "compact_bump:2",
        "--lambda",
        "1:1:1:0.5",
        "--t",
        "0:2:3",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in text.lines().skip(1) {
        let d: f64 = line.split(',').nth(7).unwrap().parse().unwrap();
        assert!(d < 1e-10);
    }
}

#[test]
fn export_writes_gnuplot_blocks() {
    let o = sphconv(&["export", "--t", "0:1:3", "--lambda", "0:1:2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# profile gaussian:1"));
    assert_eq!(text.split("\n\n\n").count(), 2);
}

#[test]
fn bad_input_is_a_usage_error() {
    for args in [
        vec!["transform", "--lambda", "1:2"],
        vec!["transform", "--profile", "triangle:1"],
        vec!["transform", "--quad", "k_nodes=0"],
        vec!["transform", "--quad", "nodes=3"],
        vec!["verify", "--suite", "nope"],
        vec!["--profile", "gaussian:1"],
    ] {
        let o = sphconv(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    }
    let o = sphconv(&["transform", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(2));
}
