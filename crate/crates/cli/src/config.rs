//! Run configuration: command-line flags layered over an optional flat
//! `key = value` file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, ValueEnum};
use sphconv::{QuadratureSpec, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Spherical function values on a (λ, t) grid.
    Eval,
    /// Spherical transform of a profile on a λ grid.
    Transform,
    /// Spherical convolution s(λ, a_t) by both strategies.
    Convolve,
    /// Round trip through the inversion formula on a t grid.
    Invert,
    /// Run verification suites.
    Verify,
    /// Profile and transform as gnuplot data blocks.
    Export,
}

impl Command {
    fn parse(s: &str) -> Result<Self> {
        <Self as ValueEnum>::from_str(s, true).map_err(|_| anyhow!("unknown command '{s}'"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "sphconv", version, about = "Spherical analysis on SL(2,R): batch tables")]
pub struct Cli {
    /// What to compute; may instead come from the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Suite name for `verify` (same as `--suite`).
    pub suite_arg: Option<String>,
    /// Profile as family:param, e.g. gaussian:1, cauchy_decay:4, compact_bump:2.
    #[arg(long)]
    pub profile: Option<String>,
    /// Spectral grid min:max:count[:imag].
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Radial grid min:max:count.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Quadrature override key=value; repeatable or comma-separated.
    #[arg(long)]
    pub quad: Vec<String>,
    /// Suite for `verify`: spherical, transform, convolution, taylor, wavepacket, schwartz or all.
    #[arg(long)]
    pub suite: Option<String>,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key = value file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// A uniform grid `min, …, max` with `count` points.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        (0..self.count)
            .map(|j| self.min + (self.max - self.min) * j as f64 / (self.count - 1) as f64)
            .collect()
    }
}

/// `min:max:count` plus an optional fourth field.
fn parse_grid(key: &str, s: &str, allow_imag: bool) -> Result<(Grid, f64)> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let max_parts = if allow_imag { 4 } else { 3 };
    if parts.len() < 3 || parts.len() > max_parts {
        let shape = if allow_imag {
            "min:max:count[:imag]"
        } else {
            "min:max:count"
        };
        bail!("--{key} expects {shape}, got '{s}'");
    }
    let num = |v: &str| -> Result<f64> {
        let x: f64 = v.parse().with_context(|| format!("--{key}: '{v}' is not a number"))?;
        if !x.is_finite() {
            bail!("--{key}: '{v}' is not finite");
        }
        Ok(x)
    };
    let (min, max) = (num(parts[0])?, num(parts[1])?);
    let count: usize = parts[2]
        .parse()
        .with_context(|| format!("--{key}: '{}' is not a count", parts[2]))?;
    if count == 0 {
        bail!("--{key}: grid is empty");
    }
    if max < min {
        bail!("--{key}: max {max} below min {min}");
    }
    let imag = if parts.len() == 4 { num(parts[3])? } else { 0.0 };
    Ok((Grid { min, max, count }, imag))
}

fn apply_quad(q: &mut QuadratureSpec, spec: &str) -> Result<()> {
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("--quad expects key=value, got '{item}'"))?;
        let (key, value) = (key.trim(), value.trim());
        let count = || {
            value
                .parse::<usize>()
                .with_context(|| format!("--quad {key}: '{value}' is not a count"))
        };
        let real = || {
            value
                .parse::<f64>()
                .with_context(|| format!("--quad {key}: '{value}' is not a number"))
        };
        match key {
            "k_nodes" => q.k_nodes = count()?,
            "t_max" => q.t_max = real()?,
            "t_panels" => q.t_panels = count()?,
            "lambda_max" => q.lambda_max = real()?,
            "lambda_nodes" => q.lambda_nodes = count()?,
            "tol" => q.tol = real()?,
            other => bail!("unknown quadrature key '{other}'"),
        }
    }
    Ok(())
}

/// Reads `key = value` lines; `#` starts a comment, `quad` may repeat.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, Vec<String>>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key = value", path.display(), n + 1))?;
        let key = key.trim().trim_start_matches("--").to_string();
        const KEYS: [&str; 7] = ["command", "profile", "lambda", "t", "quad", "suite", "out"];
        if !KEYS.contains(&key.as_str()) {
            bail!("{}:{}: unknown key '{key}'", path.display(), n + 1);
        }
        map.entry(key).or_default().push(value.trim().to_string());
    }
    Ok(map)
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub profile: RadialProfile,
    pub lambda: Grid,
    pub lambda_imag: f64,
    pub t: Grid,
    pub quadrature: QuadratureSpec,
    pub suite: String,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(cli: Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        let last = |key: &str| file.get(key).and_then(|v| v.last().cloned());
        let command = match cli.command {
            Some(c) => c,
            None => Command::parse(&last("command").ok_or_else(|| anyhow!("no command given"))?)?,
        };
        let profile_spec = cli
            .profile
            .or_else(|| last("profile"))
            .unwrap_or_else(|| "gaussian:1".into());
        let profile = RadialProfile::parse(&profile_spec).map_err(|e| anyhow!("--profile: {e}"))?;
        let (lambda, lambda_imag) = parse_grid(
            "lambda",
            &cli.lambda
                .or_else(|| last("lambda"))
                .unwrap_or_else(|| "0:10:101".into()),
            true,
        )?;
        let (t, _) = parse_grid(
            "t",
            &cli.t.or_else(|| last("t")).unwrap_or_else(|| "0:3:31".into()),
            false,
        )?;
        let mut quadrature = QuadratureSpec::default();
        for spec in file.get("quad").into_iter().flatten().chain(&cli.quad) {
            apply_quad(&mut quadrature, spec)?;
        }
        quadrature.validate().map_err(|e| anyhow!("--quad: {e}"))?;
        let suite = cli
            .suite
            .or(cli.suite_arg)
            .or_else(|| last("suite"))
            .unwrap_or_else(|| "all".into());
        let out = cli.out.or_else(|| last("out").map(PathBuf::from));
        Ok(Self {
            command,
            profile,
            lambda,
            lambda_imag,
            t,
            quadrature,
            suite,
            out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let (g, im) = parse_grid("lambda", "0:10:101:0.5", true).unwrap();
        assert_eq!((g.count, im), (101, 0.5));
        assert_eq!(g.points()[100], 10.0);
        assert!(parse_grid("t", "0:1:3:4", false).is_err());
        assert!(parse_grid("t", "0:1:0", false).is_err());
        assert!(parse_grid("t", "2:1:3", false).is_err());
        assert_eq!(parse_grid("t", "1:1:1", false).unwrap().0.points(), vec![1.0]);
    }

    #[test]
    fn quad_overrides() {
        let mut q = QuadratureSpec::default();
        apply_quad(&mut q, "k_nodes=512, t_max=40").unwrap();
        assert_eq!((q.k_nodes, q.t_max), (512, 40.0));
        assert!(apply_quad(&mut q, "bogus=1").is_err());
        assert!(apply_quad(&mut q, "k_nodes").is_err());
    }
}
