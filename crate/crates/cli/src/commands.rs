//! One function per subcommand; each returns the output text and whether
//! every check it ran passed.

use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{anyhow, Result};
use num_complex::Complex64;
use sphconv::spherical::phi_checked;
use sphconv::transform::{fmt17, hc_transform};
use sphconv::verify::{self, Suite};
use sphconv::wavepacket::{calibrate, invert_values};
use sphconv::{GroupElement, RadialProfile, SpectralParam, SpectralSamples, SphericalConvolution, Strategy, Warning};

use crate::config::{Command, RunConfig};

pub struct Output {
    pub text: String,
    pub ok: bool,
}

fn warnings_field(ws: &[Warning]) -> String {
    let joined = ws.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
    if joined.contains(',') {
        format!("\"{}\"", joined.replace('"', "\"\""))
    } else {
        joined
    }
}

fn lambdas(cfg: &RunConfig) -> Vec<SpectralParam> {
    cfg.lambda
        .points()
        .into_iter()
        .map(|re| SpectralParam::new(re, cfg.lambda_imag))
        .collect()
}

/// Reference profile for the inversion constant.
fn calibration_reference() -> RadialProfile {
    RadialProfile::gaussian(1.0).expect("positive width")
}

pub fn run(cfg: &RunConfig) -> Result<Output> {
    match cfg.command {
        Command::Eval => eval(cfg),
        Command::Transform => transform(cfg),
        Command::Convolve => convolve(cfg),
        Command::Invert => invert(cfg),
        Command::Verify => run_verify(cfg),
        Command::Export => export(cfg),
    }
}

fn eval(cfg: &RunConfig) -> Result<Output> {
    let q = &cfg.quadrature;
    let mut text = String::from("lambda_re,lambda_im,t,phi_re,phi_im,warnings\n");
    for l in lambdas(cfg) {
        for t in cfg.t.points() {
            let v = phi_checked(l, &GroupElement::diagonal(t), q);
            writeln!(
                text,
                "{},{},{},{},{},{}",
                fmt17(l.re),
                fmt17(l.im),
                fmt17(t),
                fmt17(v.value.re),
                fmt17(v.value.im),
                warnings_field(&v.warnings)
            )?;
        }
    }
    Ok(Output { text, ok: true })
}

fn transform(cfg: &RunConfig) -> Result<Output> {
    let q = &cfg.quadrature;
    let mut text = String::from("lambda_re,lambda_im,value_re,value_im,error,warnings\n");
    for l in lambdas(cfg) {
        let v = hc_transform(&cfg.profile, l, q).map_err(|e| anyhow!("transform at {}{:+}i: {e}", l.re, l.im))?;
        writeln!(
            text,
            "{},{},{},{},{},{}",
            fmt17(l.re),
            fmt17(l.im),
            fmt17(v.value.re),
            fmt17(v.value.im),
            fmt17(v.error),
            warnings_field(&v.warnings)
        )?;
    }
    Ok(Output { text, ok: true })
}

fn convolve(cfg: &RunConfig) -> Result<Output> {
    let q = &cfg.quadrature;
    let mut text =
        String::from("lambda_re,lambda_im,t,direct_re,direct_im,product_re,product_im,difference,warnings\n");
    for l in lambdas(cfg) {
        let s = SphericalConvolution::new(l, cfg.profile.clone(), Strategy::Direct);
        let p = s.with_strategy(Strategy::ProductFormula);
        for t in cfg.t.points() {
            let x = GroupElement::diagonal(t);
            let d = s
                .evaluate_checked(&x, q)
                .map_err(|e| anyhow!("convolution at t = {t}: {e}"))?;
            let pv: Complex64 = p.evaluate(&x, q).map_err(|e| anyhow!("convolution at t = {t}: {e}"))?;
            writeln!(
                text,
                "{},{},{},{},{},{},{},{},{}",
                fmt17(l.re),
                fmt17(l.im),
                fmt17(t),
                fmt17(d.value.re),
                fmt17(d.value.im),
                fmt17(pv.re),
                fmt17(pv.im),
                fmt17((d.value - pv).norm()),
                warnings_field(&d.warnings)
            )?;
        }
    }
    Ok(Output { text, ok: true })
}

fn invert(cfg: &RunConfig) -> Result<Output> {
    let q = &cfg.quadrature;
    let cal = calibrate(&calibration_reference(), q).map_err(|e| anyhow!("calibration: {e}"))?;
    let samples = SpectralSamples::of_transform_on_line(&cfg.profile, verify::INVERSION_STEP, q)
        .map_err(|e| anyhow!("sampling the transform: {e}"))?;
    let ts = cfg.t.points();
    let values = invert_values(&samples, &ts, &cal, q).map_err(|e| anyhow!("inversion: {e}"))?;
    let mut text = String::from("t,value,exact,abs_error,warnings\n");
    for (t, v) in ts.iter().zip(values) {
        let exact = cfg.profile.eval(*t);
        writeln!(
            text,
            "{},{},{},{},",
            fmt17(*t),
            fmt17(v),
            fmt17(exact),
            fmt17((v - exact).abs())
        )?;
    }
    Ok(Output { text, ok: true })
}

fn run_verify(cfg: &RunConfig) -> Result<Output> {
    let suites = Suite::select(&cfg.suite).map_err(|e| anyhow!("{e}"))?;
    let mut rows = Vec::new();
    for s in suites {
        let start = Instant::now();
        let r = s.run(&cfg.quadrature);
        let failed = r.iter().filter(|r| !r.pass).count();
        eprintln!(
            "suite {s}: {} checks, {failed} failed, {:.2} s",
            r.len(),
            start.elapsed().as_secs_f64()
        );
        rows.extend(r);
    }
    let ok = rows.iter().all(|r| r.pass);
    Ok(Output {
        text: verify::to_csv(&rows),
        ok,
    })
}

fn export(cfg: &RunConfig) -> Result<Output> {
    let q = &cfg.quadrature;
    let mut text = format!("# profile {}\n# t f\n", cfg.profile.label());
    for t in cfg.t.points() {
        writeln!(text, "{} {}", fmt17(t), fmt17(cfg.profile.eval(t)))?;
    }
    text.push_str("\n\n# lambda_re lambda_im value_re value_im\n");
    for l in lambdas(cfg) {
        let v = hc_transform(&cfg.profile, l, q).map_err(|e| anyhow!("transform: {e}"))?;
        writeln!(
            text,
            "{} {} {} {}",
            fmt17(l.re),
            fmt17(l.im),
            fmt17(v.value.re),
            fmt17(v.value.im)
        )?;
    }
    Ok(Output { text, ok: true })
}
