//! Named verification suites. Each suite evaluates a fixed battery of
//! properties on a quadrature spec and reports one row per property with
//! its measured value, the tolerance it is held to, and the margin.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convolution::{
    bound_margin, convolution_transform, kappa, kappa_expected, kappa_ratios, taylor_coefficient, taylor_partial_sum,
    SphericalConvolution, Strategy,
};
use crate::error::{Error, Result, Warning};
use crate::group::{element_from_unit, GroupElement, TangentDirection};
use crate::profile::RadialProfile;
use crate::quadrature::{composite_gauss, QuadratureSpec, RADIAL_ORDER};
use crate::reference;
use crate::schwartz::{
    convolution_seminorm_check, d_integral, general_seminorm, l2_norm_squared, seminorm, strong_inequality_check,
    xi_growth_fit, SeminormIndex,
};
use crate::spherical::{
    c_fit, check_functional_equation, phi, phi_radial, radial_casimir_residual, xi_growth, xi_radial, SpectralParam,
};
use crate::transform::{convolve_profiles, fmt17, hc_value, holomorphy_residual, z_seminorm, SpectralSamples};
use crate::wavepacket::{
    calibrate, invert_values, parseval, plancherel_density, synthesize, synthesize_reflected, PlancherelCalibration,
    WavePacketSymbol,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Spherical,
    Transform,
    Convolution,
    Taylor,
    Wavepacket,
    Schwartz,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Spherical,
        Suite::Transform,
        Suite::Convolution,
        Suite::Taylor,
        Suite::Wavepacket,
        Suite::Schwartz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Spherical => "spherical",
            Suite::Transform => "transform",
            Suite::Convolution => "convolution",
            Suite::Taylor => "taylor",
            Suite::Wavepacket => "wavepacket",
            Suite::Schwartz => "schwartz",
        }
    }

    /// Suites selected by `name`; `all` selects every suite.
    pub fn select(name: &str) -> Result<Vec<Suite>> {
        if name == "all" {
            return Ok(Self::ALL.to_vec());
        }
        Self::ALL
            .iter()
            .copied()
            .find(|s| s.name() == name)
            .map(|s| vec![s])
            .ok_or_else(|| Error::Domain(format!("unknown suite '{name}'")))
    }

    pub fn run(self, q: &QuadratureSpec) -> Vec<CheckRow> {
        match self {
            Suite::Spherical => spherical_suite(q),
            Suite::Transform => transform_suite(q),
            Suite::Convolution => convolution_suite(q),
            Suite::Taylor => taylor_suite(q),
            Suite::Wavepacket => wavepacket_suite(q),
            Suite::Schwartz => schwartz_suite(q),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One verified property.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check_id: String,
    /// Short description of the property.
    pub label: String,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    AtMost,
    AtLeast,
    Finite,
    /// `value` and `bound` are 0/1 flags that must coincide.
    Verdict,
}

struct Measured {
    value: f64,
    warnings: Vec<String>,
}

impl From<f64> for Measured {
    fn from(value: f64) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }
}

const MAX_WARNINGS: usize = 3;

fn note(warnings: &mut Vec<String>, w: &Warning) {
    let s = w.to_string();
    if !warnings.contains(&s) {
        warnings.push(s);
    }
}

fn row(id: &str, label: &str, kind: Kind, bound: f64, measure: impl FnOnce() -> Result<Measured>) -> CheckRow {
    let (value, warnings) = match measure() {
        Ok(m) => (m.value, m.warnings),
        Err(e) => (f64::NAN, vec![format!("error: {e}")]),
    };
    let mut warnings = warnings;
    if warnings.len() > MAX_WARNINGS {
        let extra = warnings.len() - MAX_WARNINGS;
        warnings.truncate(MAX_WARNINGS);
        warnings.push(format!("{extra} more"));
    }
    let margin = match kind {
        Kind::AtMost => bound - value,
        Kind::AtLeast => value - bound,
        Kind::Finite => {
            if value.is_finite() {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        }
        Kind::Verdict => -(value - bound).abs(),
    };
    let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
    CheckRow {
        check_id: id.to_string(),
        label: label.to_string(),
        value,
        bound,
        margin,
        pass: margin >= 0.0 && !value.is_nan(),
        warnings,
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Runs the suites named by `name` in order.
pub fn run(name: &str, q: &QuadratureSpec) -> Result<Vec<CheckRow>> {
    q.validate()?;
    Ok(Suite::select(name)?.into_iter().flat_map(|s| s.run(q)).collect())
}

pub const CSV_HEADER: &str = "check_id,paper_ref,value,bound,margin,pass,warnings";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Fixed-format table; identical rows give identical bytes.
pub fn to_csv(rows: &[CheckRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            csv_field(&r.check_id),
            csv_field(&r.label),
            fmt17(r.value),
            fmt17(r.bound),
            fmt17(r.margin),
            r.pass,
            csv_field(&r.warnings.join("; "))
        ));
    }
    out
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_element(r: &mut ChaCha8Rng, max_sigma: f64) -> GroupElement {
    element_from_unit(r.gen(), r.gen(), r.gen(), max_sigma)
}

fn gaussian(w: f64) -> RadialProfile {
    RadialProfile::gaussian(w).expect("positive width")
}

/// Profiles shared by the convolution batteries.
pub fn profile_battery() -> Vec<RadialProfile> {
    vec![
        gaussian(1.0),
        gaussian(0.5),
        gaussian(2.0),
        RadialProfile::compact_bump(2.0).expect("positive radius"),
        RadialProfile::cauchy_decay(4.0).expect("positive exponent"),
    ]
}

fn lambda_battery() -> Vec<SpectralParam> {
    vec![
        SpectralParam::real(0.0),
        SpectralParam::real(0.5),
        SpectralParam::real(1.0),
        SpectralParam::real(3.7),
        SpectralParam::real(10.0),
        SpectralParam::new(1.2, 0.4),
        SpectralParam::new(0.3, -0.9),
        SpectralParam::new(2.5, 1.0),
        SpectralParam::MINUS_I_RHO,
    ]
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn try_max(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m: f64 = 0.0;
    for v in values {
        m = m.max(v?);
    }
    Ok(m)
}

// ---------------------------------------------------------------- spherical

fn spherical_suite(q: &QuadratureSpec) -> Vec<CheckRow> {
    let k = q.k_nodes;
    let lambdas = lambda_battery();
    let mut rows = Vec::new();
    rows.push(row(
        "spherical.phi_identity",
        "phi_lambda(e) = 1",
        Kind::AtMost,
        1e-10,
        || {
            Ok(max_of(
                lambdas
                    .iter()
                    .map(|l| (phi(*l, &GroupElement::identity(), q) - 1.0).norm()),
            )
            .into())
        },
    ));
    rows.push(row(
        "spherical.phi_minus_i_rho",
        "phi_{-i rho} = 1 on sigma <= 5",
        Kind::AtMost,
        1e-8,
        || {
            let mut r = rng(11);
            Ok(
                max_of(
                    (0..20).map(|_| (phi(SpectralParam::MINUS_I_RHO, &random_element(&mut r, 5.0), q) - 1.0).norm()),
                )
                .into(),
            )
        },
    ));
    rows.push(row(
        "spherical.functional_equation",
        "K-mean of phi(xky) = phi(x)phi(y)",
        Kind::AtMost,
        1e-8,
        || {
            let mut r = rng(12);
            Ok(max_of((0..20).map(|_| {
                let l = SpectralParam::new(r.gen_range(-5.0..5.0), r.gen_range(-1.0..1.0));
                let g = random_element(&mut r, 2.0);
                let h = random_element(&mut r, 2.0);
                check_functional_equation(l, &g, &h, q)
            }))
            .into())
        },
    ));
    rows.push(row(
        "spherical.weyl_symmetry",
        "phi_lambda = phi_{-lambda}",
        Kind::AtMost,
        1e-8,
        || {
            Ok(max_of(lambdas.iter().flat_map(|l| {
                [0.3, 1.0, 2.5, 5.0]
                    .map(|t| (phi_radial(l.as_complex(), t, k) - phi_radial(-l.as_complex(), t, k)).norm())
            }))
            .into())
        },
    ));
    rows.push(row(
        "spherical.xi_domination",
        "|phi_lambda| - Xi for real lambda",
        Kind::AtMost,
        1e-12,
        || {
            let mut worst = f64::NEG_INFINITY;
            for l in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
                for j in 0..=40 {
                    let t = 0.25 * j as f64;
                    worst = worst.max(phi_radial(Complex64::new(l, 0.0), t, k).norm() - xi_radial(t));
                }
            }
            Ok(worst.into())
        },
    ));
    rows.push(row(
        "spherical.legendre_oracle",
        "quadrature vs hypergeometric series",
        Kind::AtMost,
        1e-8,
        || {
            let pts = [
                (Complex64::new(0.0, 0.0), 0.2),
                (Complex64::new(0.5, 0.0), 0.5),
                (Complex64::new(1.0, 0.0), 1.0),
                (Complex64::new(2.0, 0.0), 1.5),
                (Complex64::new(4.0, 0.0), 2.0),
                (Complex64::new(1.0, 0.5), 2.5),
                (Complex64::new(2.0, -0.5), 3.0),
                (Complex64::new(0.5, 1.0), 0.8),
                (Complex64::new(7.0, 0.0), 1.2),
                (Complex64::new(3.0, 0.2), 2.2),
            ];
            Ok(max_of(
                pts.iter()
                    .map(|&(l, t)| (phi_radial(l, t, k) - reference::legendre_phi(l, t)).norm()),
            )
            .into())
        },
    ));
    rows.push(row(
        "spherical.casimir",
        "radial Casimir eigen-equation residual",
        Kind::AtMost,
        1e-6,
        || {
            let grid = [0.3, 0.7, 1.5, 3.0, 5.0, 8.0];
            Ok(try_max(lambdas.iter().map(|l| radial_casimir_residual(*l, &grid, q)))?.into())
        },
    ));
    rows.push(row(
        "spherical.bounded_boundary",
        "distance of the boundedness edge from |Im lambda| = 1",
        Kind::AtMost,
        1e-2,
        || Ok((boundedness_edge(1.0, k) - 1.0).abs().into()),
    ));
    rows
}

/// `ε` where `t ↦ |φ_{μ+iε}(a_t)|` switches from decay to growth, from the
/// sign of its log-slope between `t = 10` and `t = 20`.
pub fn boundedness_edge(mu: f64, k_nodes: usize) -> f64 {
    let slope = |eps: f64| {
        let l = Complex64::new(mu, eps);
        (phi_radial(l, 20.0, k_nodes).norm().ln() - phi_radial(l, 10.0, k_nodes).norm().ln()) / 10.0
    };
    let (mut lo, mut hi) = (0.5, 1.5);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

// ---------------------------------------------------------------- transform

/// Uniform axis `lo, lo + h, …, hi`.
pub fn axis(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| lo + (hi - lo) * j as f64 / (count - 1) as f64)
        .collect()
}

fn transform_suite(q: &QuadratureSpec) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let g1 = gaussian(1.0);
    rows.push(row(
        "transform.convolution_theorem",
        "(f*g)^ = f^ g^ on [-10, 10]",
        Kind::AtMost,
        1e-6,
        || {
            let g = gaussian(0.5);
            let h = convolve_profiles(&g1, &g, q)?;
            try_max((-10..=10).map(|j| {
                let l = SpectralParam::real(j as f64);
                Ok((hc_value(&h, l, q)? - hc_value(&g1, l, q)? * hc_value(&g, l, q)?).norm())
            }))
            .map(Measured::from)
        },
    ));
    rows.push(row(
        "transform.weyl_invariance",
        "f^(lambda) = f^(-lambda)",
        Kind::AtMost,
        1e-8,
        || {
            let profiles = [
                g1.clone(),
                RadialProfile::cauchy_decay(4.0)?,
                RadialProfile::compact_bump(2.0)?,
            ];
            try_max(profiles.iter().flat_map(|f| {
                lambda_battery()
                    .into_iter()
                    .filter(|l| l.im.abs() < 1.0)
                    .map(move |l| Ok((hc_value(f, l, q)? - hc_value(f, l.weyl(), q)?).norm()))
            }))
            .map(Measured::from)
        },
    ));
    let grid = SpectralSamples::of_transform(&g1, axis(-2.0, 2.0, 41), axis(-1.0, 1.0, 21), q);
    rows.push(row(
        "transform.tube_cr",
        "Cauchy-Riemann residual on the eps = 1 strip",
        Kind::AtMost,
        1e-5,
        || Ok(holomorphy_residual(grid.as_ref().map_err(Clone::clone)?)?.into()),
    ));
    rows.push(row(
        "transform.z_seminorm",
        "tube seminorms for (m, n) <= (4, 2)",
        Kind::Finite,
        f64::INFINITY,
        || {
            let s = grid.as_ref().map_err(Clone::clone)?;
            let mut worst: f64 = 0.0;
            for m in 0..=4 {
                for n in 0..=2 {
                    worst = worst.max(z_seminorm(s, m, n)?);
                }
            }
            Ok(worst.into())
        },
    ));
    rows.push(row(
        "transform.lambda_zero_oracle",
        "f^(0) vs elliptic-integral Xi",
        Kind::AtMost,
        1e-10,
        || {
            let v = hc_value(&g1, SpectralParam::ZERO, q)?;
            let (oracle, _) = composite_gauss(
                |t: f64| g1.eval(t) * reference::xi_elliptic(t) * (2.0 * t).sinh(),
                0.0,
                12.0,
                240,
                RADIAL_ORDER,
            );
            Ok((v - oracle).norm().into())
        },
    ));
    rows
}

// -------------------------------------------------------------- convolution

fn convolution_points() -> Vec<GroupElement> {
    vec![
        GroupElement::diagonal(0.5),
        GroupElement::rotation(0.3) * GroupElement::diagonal(1.5) * GroupElement::rotation(1.1),
        GroupElement::diagonal(3.0),
        TangentDirection::new(0.2, 0.5, -0.1).exp(),
        GroupElement::unipotent(1.2),
    ]
}

fn convolution_suite(q: &QuadratureSpec) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let g1 = gaussian(1.0);
    rows.push(row(
        "convolution.strategy_agreement",
        "direct vs product formula, 5x5x5 battery (relative)",
        Kind::AtMost,
        1e-5,
        || {
            let lambdas = [
                SpectralParam::real(0.0),
                SpectralParam::real(1.0),
                SpectralParam::real(3.0),
                SpectralParam::new(0.5, 0.5),
                SpectralParam::new(2.0, -0.8),
            ];
            let mut worst: f64 = 0.0;
            let mut warnings = Vec::new();
            for f in profile_battery() {
                for l in lambdas {
                    let s = SphericalConvolution::new(l, f.clone(), Strategy::Direct);
                    for x in convolution_points() {
                        let c = s.evaluate_checked(&x, q)?;
                        let p = s.with_strategy(Strategy::ProductFormula).evaluate(&x, q)?;
                        c.warnings.iter().for_each(|w| note(&mut warnings, w));
                        worst = worst.max((c.value - p).norm() / (1.0 + p.norm()));
                    }
                }
            }
            Ok(Measured { value: worst, warnings })
        },
    ));
    let witnesses = vec![
        g1.clone(),
        gaussian(2.0),
        RadialProfile::compact_bump(2.0).expect("radius"),
    ];
    let kappa_cases = [
        (SpectralParam::real(1.0), TangentDirection::H1.scaled(0.3)),
        (SpectralParam::new(0.5, 0.5), TangentDirection::new(0.1, 0.2, -0.15)),
    ];
    rows.push(row(
        "convolution.kappa_consistency",
        "witness spread of s(exp X)/f^",
        Kind::AtMost,
        1e-5,
        || {
            try_max(kappa_cases.iter().map(|(l, x)| {
                let r = kappa_ratios(*l, x, &witnesses, q)?;
                Ok(max_of(r.iter().flat_map(|a| r.iter().map(move |b| (a - b).norm()))))
            }))
            .map(Measured::from)
        },
    ));
    rows.push(row(
        "convolution.kappa_value",
        "kappa = phi_lambda(exp X)",
        Kind::AtMost,
        1e-5,
        || {
            try_max(
                kappa_cases
                    .iter()
                    .map(|(l, x)| Ok((kappa(*l, x, &witnesses, q)? - kappa_expected(*l, x, q)).norm())),
            )
            .map(Measured::from)
        },
    ));
    rows.push(row(
        "convolution.kappa_minus_i_rho",
        "kappa = 1 at lambda = -i rho",
        Kind::AtMost,
        1e-8,
        || {
            let x = TangentDirection::new(0.3, -0.2, 0.4);
            Ok((kappa(SpectralParam::MINUS_I_RHO, &x, &witnesses, q)? - 1.0)
                .norm()
                .into())
        },
    ));
    rows.push(row(
        "convolution.constant_term_exact",
        "zeroth coefficient at e equals f^",
        Kind::AtMost,
        0.0,
        || {
            try_max(
                [SpectralParam::real(1.0), SpectralParam::new(2.0, 0.5)]
                    .iter()
                    .map(|l| {
                        let s = SphericalConvolution::new(*l, g1.clone(), Strategy::Direct);
                        let c = taylor_coefficient(&s, &GroupElement::identity(), &TangentDirection::H1, 0, q)?;
                        Ok((c.value - hc_value(&g1, *l, q)?).norm())
                    }),
            )
            .map(Measured::from)
        },
    ));
    rows.push(row(
        "convolution.constant_term_cross",
        "direct quadrature next to e vs f^",
        Kind::AtMost,
        1e-6,
        || {
            try_max(
                [SpectralParam::real(1.0), SpectralParam::new(2.0, 0.5)]
                    .iter()
                    .map(|l| {
                        let s = SphericalConvolution::new(*l, g1.clone(), Strategy::Direct);
                        let x = TangentDirection::new(1.0, 0.5, -0.5).scaled(1e-6).exp();
                        Ok((s.evaluate(&x, q)? - hc_value(&g1, *l, q)?).norm())
                    }),
            )
            .map(Measured::from)
        },
    ));
    rows.push(row(
        "convolution.bound_margin",
        "min of d(x) mu(f) - |s(x)| over 50 random points",
        Kind::AtLeast,
        -1e-8,
        || {
            let mut r = rng(31);
            let battery = profile_battery();
            let mut worst = f64::INFINITY;
            for _ in 0..50 {
                let f = &battery[r.gen_range(0..battery.len())];
                let x = random_element(&mut r, 3.0);
                let l = SpectralParam::real(r.gen_range(-5.0..5.0));
                worst = worst.min(bound_margin(f, &x, l, 4, q)?);
            }
            Ok(worst.into())
        },
    ));
    let x02 = TangentDirection::H1.scaled(0.2).exp();
    let re = axis(-5.0, 5.0, 11);
    rows.push(row(
        "convolution.transform_at_identity",
        "normalized transform at e vs f^",
        Kind::AtMost,
        1e-12,
        || {
            let s = convolution_transform(
                &g1,
                &GroupElement::identity(),
                re.clone(),
                vec![0.0, 0.5],
                Strategy::Direct,
                q,
            )?;
            try_max(s.value.iter().map(|(l, v)| Ok((v - hc_value(&g1, l, q)?).norm()))).map(Measured::from)
        },
    ));
    rows.push(row(
        "convolution.transform_linearity",
        "normalized transform of f + g",
        Kind::AtMost,
        1e-8,
        || {
            let g = gaussian(0.5);
            let sum = g1.plus(&g);
            let a = convolution_transform(&g1, &x02, re.clone(), vec![0.0], Strategy::Direct, q)?;
            let b = convolution_transform(&g, &x02, re.clone(), vec![0.0], Strategy::Direct, q)?;
            let c = convolution_transform(&sum, &x02, re.clone(), vec![0.0], Strategy::Direct, q)?;
            let d = max_of((0..re.len()).map(|i| (c.value.at(i, 0) - a.value.at(i, 0) - b.value.at(i, 0)).norm()));
            let mut warnings = Vec::new();
            for w in a.warnings.iter().chain(&b.warnings).chain(&c.warnings) {
                note(&mut warnings, w);
            }
            Ok(Measured { value: d, warnings })
        },
    ));
    rows.push(row(
        "convolution.transform_algebra",
        "normalized transform of f*g is multiplicative",
        Kind::AtMost,
        1e-5,
        || {
            let g = gaussian(0.5);
            let h = convolve_profiles(&g1, &g, q)?;
            let a = convolution_transform(&g1, &x02, re.clone(), vec![0.0], Strategy::Direct, q)?;
            let b = convolution_transform(&g, &x02, re.clone(), vec![0.0], Strategy::Direct, q)?;
            let c = convolution_transform(&h, &x02, re.clone(), vec![0.0], Strategy::Direct, q)?;
            let mut warnings = Vec::new();
            let mut worst: f64 = 0.0;
            for (i, &lambda) in re.iter().enumerate() {
                let l = SpectralParam::real(lambda);
                if phi(l, &x02, q).norm() <= crate::convolution::SMALL_DIVISOR {
                    note(
                        &mut warnings,
                        &Warning::SmallDivisor {
                            lambda_re: l.re,
                            lambda_im: 0.0,
                            divisor: 0.0,
                        },
                    );
                    continue;
                }
                worst = worst.max((c.value.at(i, 0) - a.value.at(i, 0) * b.value.at(i, 0)).norm());
            }
            Ok(Measured { value: worst, warnings })
        },
    ));
    rows.push(row(
        "convolution.lambda_continuity",
        "modulus of continuity ratio per halving of the lambda step",
        Kind::AtMost,
        0.6,
        || {
            let x = GroupElement::diagonal(1.0);
            let modulus = |h: f64| -> Result<f64> {
                let n = (5.0 / h).round() as usize;
                let vals: Vec<Complex64> = (0..=n)
                    .map(|j| {
                        SphericalConvolution::new(SpectralParam::real(j as f64 * h), g1.clone(), Strategy::Direct)
                            .evaluate(&x, q)
                    })
                    .collect::<Result<_>>()?;
                Ok(max_of(vals.windows(2).map(|w| (w[1] - w[0]).norm())))
            };
            Ok((modulus(0.1)? / modulus(0.2)?).into())
        },
    ));
    rows
}

// ------------------------------------------------------------------- taylor

/// Along `H` at `e` the odd coefficients vanish, so consecutive errors tie
/// exactly; this absorbs the finite-difference residue of those zeros.
pub const CONVERGENCE_SLACK: f64 = 1e-12;

fn taylor_suite(q: &QuadratureSpec) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let g1 = gaussian(1.0);
    let e = GroupElement::identity();
    let l1 = SpectralParam::real(1.0);
    rows.push(row(
        "taylor.second_derivative_oracle",
        "d2/du2 s(exp uH) at 0 = -f^(lambda)(lambda^2 + 1)/2",
        Kind::AtMost,
        1e-4,
        || {
            let s = SphericalConvolution::new(l1, g1.clone(), Strategy::Direct);
            let c = taylor_coefficient(&s, &e, &TangentDirection::H1, 2, q)?;
            let oracle = -hc_value(&g1, l1, q)? * (l1.re * l1.re + 1.0) * 0.5;
            let mut warnings = Vec::new();
            c.warnings.iter().for_each(|w| note(&mut warnings, w));
            Ok(Measured {
                value: (c.value - oracle).norm(),
                warnings,
            })
        },
    ));
    rows.push(row(
        "taylor.zero_step",
        "partial sum at t = 0 equals s(x)",
        Kind::AtMost,
        0.0,
        || {
            let s = SphericalConvolution::new(l1, g1.clone(), Strategy::Direct);
            let x = GroupElement::diagonal(0.5);
            let p = taylor_partial_sum(&s, &x, &TangentDirection::H1, 0.0, 8, q)?;
            Ok((p.value - s.evaluate(&x, q)?).norm().into())
        },
    ));
    rows.push(row(
        "taylor.small_step_oracle",
        "N = 8, t = 0.1 at e along H",
        Kind::AtMost,
        1e-6,
        || {
            let s = SphericalConvolution::new(l1, g1.clone(), Strategy::Direct);
            let p = taylor_partial_sum(&s, &e, &TangentDirection::H1, 0.1, 8, q)?;
            let target = s.evaluate(&TangentDirection::H1.scaled(0.1).exp(), q)?;
            let mut warnings = Vec::new();
            p.warnings.iter().for_each(|w| note(&mut warnings, w));
            Ok(Measured {
                value: (p.value - target).norm(),
                warnings,
            })
        },
    ));
    rows.push(row(
        "taylor.partial_sum",
        "N = 8 partial sums for |t| <= 0.25",
        Kind::AtMost,
        1e-5,
        || {
            let cases = [
                (
                    SpectralParam::real(1.0),
                    GroupElement::identity(),
                    TangentDirection::H1,
                    0.25,
                ),
                (
                    SpectralParam::real(1.0),
                    GroupElement::diagonal(0.5),
                    TangentDirection::new(0.3, 0.6, -0.2),
                    -0.25,
                ),
                (
                    SpectralParam::new(0.5, 0.3),
                    GroupElement::unipotent(0.4),
                    TangentDirection::new(-0.5, 0.2, 0.4),
                    0.2,
                ),
                (
                    SpectralParam::real(3.0),
                    GroupElement::diagonal(1.0),
                    TangentDirection::H1,
                    0.15,
                ),
            ];
            let mut worst: f64 = 0.0;
            let mut warnings = Vec::new();
            for (l, x, dir, t) in cases {
                let s = SphericalConvolution::new(l, g1.clone(), Strategy::Direct);
                let p = taylor_partial_sum(&s, &x, &dir, t, 8, q)?;
                p.warnings.iter().for_each(|w| note(&mut warnings, w));
                let target = s.evaluate(&(x * dir.scaled(t).exp()), q)?;
                worst = worst.max((p.value - target).norm());
            }
            Ok(Measured { value: worst, warnings })
        },
    ));
    rows.push(row(
        "taylor.convergence",
        "largest increase of the partial-sum error over N = 0..6 at exp(0.2 H)",
        Kind::AtMost,
        CONVERGENCE_SLACK,
        || {
            let s = SphericalConvolution::new(l1, g1.clone(), Strategy::Direct);
            let dir = TangentDirection::H1;
            let x = GroupElement::identity();
            let target = s.evaluate(&(x * dir.scaled(0.2).exp()), q)?;
            let errors: Vec<f64> = (0..=6)
                .map(|n| Ok((taylor_partial_sum(&s, &x, &dir, 0.2, n, q)?.value - target).norm()))
                .collect::<Result<_>>()?;
            Ok(errors
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::NEG_INFINITY, f64::max)
                .into())
        },
    ));
    rows
}

// --------------------------------------------------------------- wavepacket

fn round_trip_error(f: &RadialProfile, t_end: f64, cal: &PlancherelCalibration, q: &QuadratureSpec) -> Result<f64> {
    let samples = SpectralSamples::of_transform_on_line(f, INVERSION_STEP, q)?;
    let ts = axis(0.0, t_end, (t_end / 0.1).round() as usize + 1);
    let v = invert_values(&samples, &ts, cal, q)?;
    Ok(max_of(ts.iter().zip(&v).map(|(t, v)| (f.eval(*t) - v).abs())))
}

/// Spectral step used to tabulate transforms for inversion.
pub const INVERSION_STEP: f64 = 0.1;

fn wavepacket_suite(q: &QuadratureSpec) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let g1 = gaussian(1.0);
    let cal = calibrate(&g1, q);
    rows.push(row(
        "wavepacket.calibration_residual",
        "round trip at t = 0.5, 1, 2, 3",
        Kind::AtMost,
        1e-4,
        || Ok(cal.as_ref().map_err(Clone::clone)?.residual.into()),
    ));
    rows.push(row(
        "wavepacket.calibration_cross",
        "constant from gaussian:2 vs gaussian:1 (relative)",
        Kind::AtMost,
        1e-4,
        || {
            let c1 = cal.as_ref().map_err(Clone::clone)?.constant;
            let c2 = calibrate(&gaussian(2.0), q)?.constant;
            Ok((c2 / c1 - 1.0).abs().into())
        },
    ));
    rows.push(row(
        "wavepacket.calibration_constant",
        "calibrated constant vs 1/pi (relative)",
        Kind::AtMost,
        1e-6,
        || {
            let c = cal.as_ref().map_err(Clone::clone)?.constant;
            Ok((c / reference::INVERSION_CONSTANT - 1.0).abs().into())
        },
    ));
    for w in [0.5, 1.0, 2.0] {
        rows.push(row(
            &format!("wavepacket.round_trip_gaussian_{w}"),
            "sup error of inverse transform on [0, 3]",
            Kind::AtMost,
            1e-4,
            || Ok(round_trip_error(&gaussian(w), 3.0, cal.as_ref().map_err(Clone::clone)?, q)?.into()),
        ));
    }
    rows.push(row(
        "wavepacket.round_trip_bump",
        "sup error of inverse transform of compact_bump:2 on [0, 1.5]",
        Kind::AtMost,
        1e-3,
        || {
            Ok(round_trip_error(
                &RadialProfile::compact_bump(2.0)?,
                1.5,
                cal.as_ref().map_err(Clone::clone)?,
                q,
            )?
            .into())
        },
    ));
    rows.push(row(
        "wavepacket.parseval",
        "L2 norm vs spectral L2 norm (relative)",
        Kind::AtMost,
        1e-4,
        || {
            let c = cal.as_ref().map_err(Clone::clone)?;
            try_max([0.5, 1.0, 2.0].iter().map(|&w| {
                let (lhs, rhs) = parseval(&gaussian(w), c, q)?;
                Ok((rhs / lhs - 1.0).abs())
            }))
            .map(Measured::from)
        },
    ));
    rows.push(row(
        "wavepacket.reflection",
        "synthesis invariant under lambda -> -lambda",
        Kind::AtMost,
        1e-10,
        || {
            let c = cal.as_ref().map_err(Clone::clone)?;
            let a = WavePacketSymbol::from_transform(&g1, q);
            try_max([0.0, 0.7, 2.0].iter().map(|&t| {
                let x = GroupElement::diagonal(t);
                Ok((synthesize(&a, &x, c, q)?.value - synthesize_reflected(&a, &x, c, q)?.value).norm())
            }))
            .map(Measured::from)
        },
    ));
    rows.push(row(
        "wavepacket.restriction",
        "x-dependent symbol equal to f^ near e vs its restriction",
        Kind::AtMost,
        1e-6,
        || {
            let c = cal.as_ref().map_err(Clone::clone)?;
            let a = WavePacketSymbol::from_transform(&g1, q);
            let inner = a.clone();
            let cutoff = |s: f64| {
                if s <= 0.5 {
                    1.0
                } else if s >= 1.0 {
                    0.0
                } else {
                    0.5 + 0.5 * (std::f64::consts::PI * (s - 0.5) / 0.5).cos()
                }
            };
            let b =
                WavePacketSymbol::x_dependent("cutoff symbol", move |l, x| inner.eval(l, x) * cutoff(x.sigma()), true)?;
            try_max([0.05, 0.1, 0.2].iter().map(|&t| {
                let x = GroupElement::rotation(0.4) * GroupElement::diagonal(t) * GroupElement::rotation(-1.0);
                Ok((synthesize(&a, &x, c, q)?.value - synthesize(&b, &x, c, q)?.value).norm())
            }))
            .map(Measured::from)
        },
    ));
    rows.push(row(
        "wavepacket.density_evenness",
        "density(lambda) = density(-lambda)",
        Kind::AtMost,
        1e-6,
        || {
            try_max(
                [0.5, 2.0, 7.5]
                    .iter()
                    .map(|&l| Ok((plancherel_density(l, q)? - plancherel_density(-l, q)?).abs())),
            )
            .map(Measured::from)
        },
    ));
    rows.push(row(
        "wavepacket.c_conjugation",
        "c(-lambda) = conj c(lambda)",
        Kind::AtMost,
        1e-4,
        || {
            try_max([1.0, 2.0, 4.0].iter().map(|&l| {
                let fit = c_fit(l, q)?;
                let minus = c_fit(-l, q)?;
                Ok((fit.minus - fit.plus.conj())
                    .norm()
                    .max((minus.plus - fit.plus.conj()).norm()))
            }))
            .map(Measured::from)
        },
    ));
    rows.push(row(
        "wavepacket.c_closed_form",
        "fitted c vs Gamma-function formula",
        Kind::AtMost,
        1e-4,
        || {
            try_max(
                [1.0, 2.0, 4.0]
                    .iter()
                    .map(|&l| Ok((c_fit(l, q)?.plus - reference::c_function(Complex64::new(l, 0.0))).norm())),
            )
            .map(Measured::from)
        },
    ));
    rows
}

// ----------------------------------------------------------------- schwartz

/// `d(e)` for `r = 4` from an independent high-precision quadrature.
pub const D_IDENTITY_R4: f64 = 0.520_835_558_009_610_8;

fn schwartz_suite(q: &QuadratureSpec) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let g1 = gaussian(1.0);
    let e = GroupElement::identity();
    let a1 = GroupElement::diagonal(1.0);
    rows.push(row(
        "schwartz.xi_lower_bound",
        "min of Xi(a_t) e^t on [0, 20]",
        Kind::AtLeast,
        1.0 - 1e-8,
        || Ok(xi_growth(20.0, 401)?.min_scaled.into()),
    ));
    rows.push(row(
        "schwartz.xi_exponent",
        "|d - 1| for the fitted growth exponent",
        Kind::AtMost,
        0.1,
        || Ok((xi_growth_fit(20.0)?.1 - 1.0).abs().into()),
    ));
    for (name, x) in [("identity", e), ("a1", a1)] {
        rows.push(row(
            &format!("schwartz.d_truncation_{name}"),
            "d(x), r = 4, t_max 30 vs 40 (relative)",
            Kind::AtMost,
            1e-6,
            || {
                let a = d_integral(&x, 4, q)?;
                let b = d_integral(&x, 4, &q.with_t_max(q.t_max + 10.0))?;
                Ok((b / a - 1.0).abs().into())
            },
        ));
    }
    rows.push(row(
        "schwartz.d_oracle",
        "d(e), r = 4, vs independent quadrature (relative)",
        Kind::AtMost,
        1e-8,
        || Ok((d_integral(&e, 4, q)? / D_IDENTITY_R4 - 1.0).abs().into()),
    ));
    rows.push(row("schwartz.d_growth", "d(a1)/d(e)", Kind::AtMost, 10.0, || {
        Ok((d_integral(&a1, 4, q)? / d_integral(&e, 4, q)?).into())
    }));
    rows.push(row(
        "schwartz.d_translation",
        "d(a1) vs d(e) (relative)",
        Kind::AtMost,
        1e-6,
        || Ok((d_integral(&a1, 4, q)? / d_integral(&e, 4, q)? - 1.0).abs().into()),
    ));
    rows.push(row(
        "schwartz.strong_gaussian",
        "gaussian:1 satisfies the strong inequality, r = 6",
        Kind::Verdict,
        1.0,
        || Ok(flag(strong_inequality_check(&g1, &e, 6, q)?.holds).into()),
    ));
    rows.push(row(
        "schwartz.strong_algebraic",
        "1/(1+t^2) fails the strong inequality, r = 6",
        Kind::Verdict,
        0.0,
        || {
            let f = RadialProfile::custom("1/(1+t^2)", crate::profile::Decay::Unknown, |t| 1.0 / (1.0 + t * t));
            Ok(flag(strong_inequality_check(&f, &e, 6, q)?.holds).into())
        },
    ));
    let idx = SeminormIndex::new(1, 1, 3, 2.0).expect("valid index");
    rows.push(row(
        "schwartz.homogeneity",
        "mu(alpha f) vs |alpha| mu(f) (relative)",
        Kind::AtMost,
        1e-10,
        || {
            let base = seminorm(&g1, &idx, q);
            Ok(max_of(
                [-2.5, 0.3]
                    .iter()
                    .map(|&a| (seminorm(&g1.scaled(a), &idx, q) / (a.abs() * base) - 1.0).abs()),
            )
            .into())
        },
    ));
    rows.push(row(
        "schwartz.triangle",
        "mu(f + g) - mu(f) - mu(g)",
        Kind::AtMost,
        1e-10,
        || {
            let g = gaussian(0.5);
            Ok((seminorm(&g1.plus(&g), &idx, q) - seminorm(&g1, &idx, q) - seminorm(&g, &idx, q)).into())
        },
    ));
    rows.push(row(
        "schwartz.monotone_r",
        "mu_r - mu_{r+1}, largest over r < 8",
        Kind::AtMost,
        1e-10,
        || {
            let mu = |r: u32| seminorm(&g1, &SeminormIndex { r, ..idx }, q);
            Ok((0..8)
                .map(|r| mu(r) - mu(r + 1))
                .fold(f64::NEG_INFINITY, f64::max)
                .into())
        },
    ));
    rows.push(row(
        "schwartz.nesting_p",
        "mu with p = 2 minus mu with p = 1",
        Kind::AtMost,
        1e-10,
        || {
            let g = gaussian(0.5);
            let p2 = seminorm(&g, &SeminormIndex::weight(2), q);
            let p1 = seminorm(
                &g,
                &SeminormIndex {
                    p: 1.0,
                    ..SeminormIndex::weight(2)
                },
                q,
            );
            Ok((p2 - p1).into())
        },
    ));
    rows.push(row(
        "schwartz.recentred_identity",
        "mu^(e) vs mu (relative)",
        Kind::AtMost,
        1e-10,
        || {
            let w = SeminormIndex::weight(4);
            Ok((general_seminorm(&g1, &e, &w, q)? / seminorm(&g1, &w, q) - 1.0)
                .abs()
                .into())
        },
    ));
    rows.push(row(
        "schwartz.l2_finite",
        "largest L2 norm over the battery",
        Kind::Finite,
        f64::INFINITY,
        || {
            let mut warnings = Vec::new();
            let mut worst: f64 = 0.0;
            for f in profile_battery() {
                let i = l2_norm_squared(&f, q);
                i.warnings.iter().for_each(|w| note(&mut warnings, w));
                worst = worst.max(i.value);
            }
            Ok(Measured { value: worst, warnings })
        },
    ));
    for (id, l, r, expected) in [
        ("schwartz.convolution_seminorm_r0", SpectralParam::real(0.5), 0, true),
        ("schwartz.convolution_seminorm_r2", SpectralParam::real(0.5), 2, false),
        (
            "schwartz.convolution_seminorm_minus_i_rho",
            SpectralParam::MINUS_I_RHO,
            0,
            false,
        ),
    ] {
        rows.push(row(
            id,
            "recorded verdict of the convolution seminorm estimate",
            Kind::Verdict,
            flag(expected),
            || Ok(flag(convolution_seminorm_check(&g1, l, &SeminormIndex::weight(r), q)?.holds).into()),
        ));
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_suites() {
        assert_eq!(Suite::select("all").unwrap().len(), 6);
        assert_eq!(Suite::select("taylor").unwrap(), vec![Suite::Taylor]);
        assert!(Suite::select("nope").is_err());
    }

    #[test]
    fn row_kinds() {
        let r = row("a", "b", Kind::AtMost, 1.0, || Ok(0.5.into()));
        assert!(r.pass && r.margin == 0.5);
        let r = row("a", "b", Kind::AtLeast, 1.0, || Ok(0.5.into()));
        assert!(!r.pass);
        let r = row("a", "b", Kind::Finite, f64::INFINITY, || Ok(f64::INFINITY.into()));
        assert!(!r.pass);
        let r = row("a", "b", Kind::Verdict, 0.0, || Ok(0.0.into()));
        assert!(r.pass);
        let r = row("a", "b", Kind::AtMost, 1.0, || Err(Error::Domain("x".into())));
        assert!(!r.pass && r.warnings[0].starts_with("error"));
    }

    #[test]
    fn csv_quotes_fields() {
        let r = row("a", "x, y", Kind::AtMost, 1.0, || Ok(0.5.into()));
        let csv = to_csv(&[r]);
        assert!(csv.starts_with(CSV_HEADER));
        assert!(csv.contains("\"x, y\""));
    }
}
