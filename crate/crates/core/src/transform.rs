//! The spherical (Harish-Chandra) transform of radial profiles, tube
//! domains, and sampled spectral functions with holomorphy and seminorm
//! diagnostics.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result, Warning};
use crate::profile::RadialProfile;
use crate::quadrature::{composite_gauss, split_gauss, Integral, QuadratureSpec, ZonalRule, RADIAL_ORDER};
use crate::spherical::{phi_radial, SpectralParam};

/// Integrand magnitudes below this fraction of the peak are treated as zero
/// when choosing the radial cut.
pub(crate) const NEGLIGIBLE: f64 = 1e-18;

/// Relative level below which spectral samples count as quadrature noise.
pub const SPECTRAL_NEGLIGIBLE: f64 = 1e-13;

/// Radial panel width that keeps 12-point Gauss panels exact to rounding
/// for integrands oscillating like `e^{iλt}`.
pub(crate) fn panel_width_for(lambda: Complex64, q: &QuadratureSpec) -> f64 {
    q.panel_width().min(4.0 / (lambda.re.abs() + 1.0))
}

/// Where `f(t)·φ_λ(a_t)·sinh 2t` becomes negligible: `|φ_λ(a_t)| ≲ e^{(|Im λ|-1)t}(1+t)`.
pub(crate) fn transform_radius(f: &RadialProfile, lambda: Complex64, q: &QuadratureSpec) -> f64 {
    let growth = 1.5 + (lambda.im.abs() - 1.0).max(0.0);
    f.effective_radius(growth, NEGLIGIBLE, q.t_max)
}

/// `f̂(λ) = ∫_G f(x)φ_{-λ}(x) dx = ∫_0^∞ f(t)φ_{-λ}(a_t) sinh(2t) dt`.
///
/// The radial range stops where the integrand is negligible (or at
/// `t_max`); the error field compares against half the panels.
pub fn hc_transform(f: &RadialProfile, lambda: SpectralParam, q: &QuadratureSpec) -> Result<Integral<Complex64>> {
    let (value, coarse, warnings) = transform_parts(f, lambda, q, true)?;
    Ok(Integral {
        value,
        error: (value - coarse).norm(),
        warnings,
    })
}

/// [`hc_transform`] without the error estimate.
pub fn hc_value(f: &RadialProfile, lambda: SpectralParam, q: &QuadratureSpec) -> Result<Complex64> {
    transform_parts(f, lambda, q, false).map(|r| r.0)
}

fn transform_parts(
    f: &RadialProfile,
    lambda: SpectralParam,
    q: &QuadratureSpec,
    estimate: bool,
) -> Result<(Complex64, Complex64, Vec<Warning>)> {
    let margin = f.tube_margin();
    if lambda.im.abs() >= margin {
        return Err(Error::Domain(format!(
            "|Im λ| = {} outside the convergence strip |Im λ| < {margin} of {}",
            lambda.im.abs(),
            f.label()
        )));
    }
    let l = lambda.as_complex();
    let end = transform_radius(f, l, q);
    let zero = Complex64::new(0.0, 0.0);
    if end <= 0.0 {
        return Ok((zero, zero, Vec::new()));
    }
    let integrand = |t: f64| phi_radial(-l, t, q.k_nodes) * (f.eval(t) * (2.0 * t).sinh());
    let panels = (end / panel_width_for(l, q)).ceil().max(1.0) as usize;
    let width = end / panels as f64;
    let cuts = f.breakpoints();
    let (value, peak) = split_gauss(integrand, 0.0, end, &cuts, width, RADIAL_ORDER);
    let coarse = if estimate {
        split_gauss(integrand, 0.0, end, &cuts, 2.0 * width, RADIAL_ORDER).0
    } else {
        value
    };
    let mut warnings = Vec::new();
    if end >= q.t_max {
        let tail = integrand(q.t_max).norm();
        if tail > q.tol.min(1e-12 * peak.max(1.0)) {
            warnings.push(Warning::Truncation {
                at: q.t_max,
                magnitude: tail,
            });
        }
    }
    Ok((value, coarse, warnings))
}

/// `(f∗g)(a_t) = ∫_G f(y) g(y⁻¹a_t) dy` sampled on `t ∈ [0, T]` and returned
/// as an interpolated profile. The inner K-mean uses
/// `sinh²σ(a_{-s}k(θ)a_t) = sinh²(s-t)cos²θ + sinh²(s+t)sin²θ`.
pub fn convolve_profiles(f: &RadialProfile, g: &RadialProfile, q: &QuadratureSpec) -> Result<RadialProfile> {
    const STEP: f64 = 0.04;
    let rf = f.effective_radius(2.0, NEGLIGIBLE, q.t_max);
    let rg = g.effective_radius(2.0, NEGLIGIBLE, q.t_max);
    let end = (rf + rg).min(q.t_max);
    let count = (end / STEP).ceil() as usize + 1;
    let refinement = ZonalRule::refinement_for(0.0, q.k_nodes);
    let panels = (rf / q.panel_width()).ceil().max(1.0) as usize;
    let values: Vec<f64> = (0..count)
        .map(|j| {
            let t = j as f64 * STEP;
            let inner = |s: f64| -> f64 {
                let (a, b) = ((s - t).sinh().powi(2), (s + t).sinh().powi(2));
                let ln_ratio = (2.0 * (s - t)).cosh().ln() - (2.0 * (s + t)).cosh().ln();
                let rule = ZonalRule::new(ln_ratio, refinement);
                let mean = rule.mean(|n| g.eval((a * n.cos2 + b * n.sin2).sqrt().asinh()));
                f.eval(s) * (2.0 * s).sinh() * mean
            };
            if rf <= 0.0 {
                0.0
            } else {
                composite_gauss(inner, 0.0, rf, panels, RADIAL_ORDER).0
            }
        })
        .collect();
    let sampled = RadialProfile::sampled(STEP, values)?;
    Ok(RadialProfile::custom(
        format!("({})*({})", f.label(), g.label()),
        sampled.decay(),
        move |t| sampled.eval(t),
    ))
}

/// The strip `|Im λ| ≤ ε` (with `ρ = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeDomain {
    pub epsilon: f64,
}

/// `ε = 2/p - 1` for `p ∈ (0, 2]`.
pub fn tube_for_p(p: f64) -> Result<TubeDomain> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::Domain(format!("p must lie in (0, 2], got {p}")));
    }
    Ok(TubeDomain { epsilon: 2.0 / p - 1.0 })
}

pub fn in_tube(lambda: SpectralParam, d: TubeDomain) -> bool {
    lambda.im.abs() <= d.epsilon
}

/// A function sampled on a rectangular grid of spectral parameters.
/// Values are stored row by row: imaginary part outer, real part inner.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSamples {
    re: Vec<f64>,
    im: Vec<f64>,
    values: Vec<Complex64>,
    source: String,
    quadrature: Option<QuadratureSpec>,
}

impl SpectralSamples {
    pub fn new(re: Vec<f64>, im: Vec<f64>, values: Vec<Complex64>, source: impl Into<String>) -> Result<Self> {
        for (axis, name) in [(&re, "real"), (&im, "imaginary")] {
            if axis.is_empty() {
                return Err(Error::Grid(format!("{name} axis is empty")));
            }
            if axis
                .windows(2)
                .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
            {
                return Err(Error::Grid(format!("{name} axis must be strictly increasing")));
            }
        }
        if values.len() != re.len() * im.len() {
            return Err(Error::Grid(format!(
                "{} values for a {}x{} grid",
                values.len(),
                re.len(),
                im.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Grid("sample values must be finite".into()));
        }
        Ok(Self {
            re,
            im,
            values,
            source: source.into(),
            quadrature: None,
        })
    }

    /// Samples `phi` on the grid.
    pub fn sample(
        re: Vec<f64>,
        im: Vec<f64>,
        source: impl Into<String>,
        mut phi: impl FnMut(SpectralParam) -> Result<Complex64>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(re.len() * im.len());
        for &y in &im {
            for &x in &re {
                values.push(phi(SpectralParam::new(x, y))?);
            }
        }
        Self::new(re, im, values, source)
    }

    /// `f̂` on the grid.
    pub fn of_transform(f: &RadialProfile, re: Vec<f64>, im: Vec<f64>, q: &QuadratureSpec) -> Result<Self> {
        let mut s = Self::sample(re, im, f.label(), |l| hc_value(f, l, q))?;
        s.quadrature = Some(*q);
        Ok(s)
    }

    /// `f̂` on `0, h, 2h, …` up to `λ_max`, stopping once `|f̂(λ)|(1+λ)`
    /// has stayed below `1e-13` of its peak for eight nodes.
    pub fn of_transform_on_line(f: &RadialProfile, step: f64, q: &QuadratureSpec) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Grid(format!("spectral step must be positive, got {step}")));
        }
        let mut re = Vec::new();
        let mut values = Vec::new();
        let mut peak: f64 = 0.0;
        let mut quiet = 0;
        let count = (q.lambda_max / step).floor() as usize;
        for j in 0..=count {
            let l = j as f64 * step;
            let v = hc_value(f, SpectralParam::real(l), q)?;
            re.push(l);
            values.push(v);
            let m = v.norm() * (1.0 + l);
            peak = peak.max(m);
            quiet = if m <= SPECTRAL_NEGLIGIBLE * peak { quiet + 1 } else { 0 };
            if quiet >= 8 {
                break;
            }
        }
        let mut s = Self::new(re, vec![0.0], values, f.label())?;
        s.quadrature = Some(*q);
        Ok(s)
    }

    pub fn re_axis(&self) -> &[f64] {
        &self.re
    }

    pub fn im_axis(&self) -> &[f64] {
        &self.im
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn quadrature(&self) -> Option<&QuadratureSpec> {
        self.quadrature.as_ref()
    }

    pub fn at(&self, i_re: usize, i_im: usize) -> Complex64 {
        self.values[i_im * self.re.len() + i_re]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(λ, value)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (SpectralParam, Complex64)> + '_ {
        self.im.iter().enumerate().flat_map(move |(j, &y)| {
            self.re
                .iter()
                .enumerate()
                .map(move |(i, &x)| (SpectralParam::new(x, y), self.values[j * self.re.len() + i]))
        })
    }

    /// Columns `re_lambda,im_lambda,re_value,im_value`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re_lambda,im_lambda,re_value,im_value\n");
        for (l, v) in self.iter() {
            let _ = writeln!(out, "{},{},{},{}", fmt17(l.re), fmt17(l.im), fmt17(v.re), fmt17(v.im));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Grid("empty CSV".into()))?;
        if header.trim() != "re_lambda,im_lambda,re_value,im_value" {
            return Err(Error::Grid(format!("unexpected header '{header}'")));
        }
        let mut rows = Vec::new();
        for line in lines {
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Grid(format!("bad CSV row '{line}': {e}")))?;
            if cols.len() != 4 {
                return Err(Error::Grid(format!("expected 4 columns in '{line}'")));
            }
            rows.push(cols);
        }
        let mut re: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let mut im: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        re.sort_by(f64::total_cmp);
        re.dedup();
        im.sort_by(f64::total_cmp);
        im.dedup();
        let mut values = vec![Complex64::new(f64::NAN, f64::NAN); re.len() * im.len()];
        for r in &rows {
            let i = re.binary_search_by(|x| x.total_cmp(&r[0])).expect("present");
            let j = im.binary_search_by(|x| x.total_cmp(&r[1])).expect("present");
            values[j * re.len() + i] = Complex64::new(r[2], r[3]);
        }
        Self::new(re, im, values, "csv")
    }
}

/// Shortest round-trip decimal is not fixed-width; this is.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn uniform_step(axis: &[f64], name: &str) -> Result<f64> {
    let h = axis[1] - axis[0];
    let uniform = axis
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1e-300));
    if !uniform {
        return Err(Error::Grid(format!("{name} axis must be uniformly spaced")));
    }
    Ok(h)
}

/// First derivative along an axis at index `i` of `n`; fourth order where
/// two neighbours exist on both sides.
fn axis_derivative(v: impl Fn(usize) -> Complex64, i: usize, n: usize, h: f64, wide: bool) -> Complex64 {
    if wide && i >= 2 && i + 2 < n {
        (v(i - 2) - v(i - 1) * 8.0 + v(i + 1) * 8.0 - v(i + 2)) / (12.0 * h)
    } else {
        (v(i + 1) - v(i - 1)) / (2.0 * h)
    }
}

/// `sup |∂_x Φ + i ∂_y Φ|` over interior nodes (zero for holomorphic `Φ`,
/// `2` for `Φ = conj(λ)`). Grids with at least five nodes per axis use
/// fourth-order differences on nodes at distance two from the edge.
pub fn holomorphy_residual(s: &SpectralSamples) -> Result<f64> {
    let (nx, ny) = (s.re.len(), s.im.len());
    if nx < 3 || ny < 3 {
        return Err(Error::Grid(format!("need at least 3 nodes per axis, got {nx}x{ny}")));
    }
    let hx = uniform_step(&s.re, "real")?;
    let hy = uniform_step(&s.im, "imaginary")?;
    let wide = nx >= 5 && ny >= 5;
    let (lo, hi_x, hi_y) = if wide { (2, nx - 2, ny - 2) } else { (1, nx - 1, ny - 1) };
    let mut worst: f64 = 0.0;
    for j in lo..hi_y {
        for i in lo..hi_x {
            let dx = axis_derivative(|k| s.at(k, j), i, nx, hx, wide);
            let dy = axis_derivative(|k| s.at(i, k), j, ny, hy, wide);
            worst = worst.max((dx + Complex64::i() * dy).norm());
        }
    }
    Ok(worst)
}

/// `sup |λ^m ∂^n Φ(λ)|` over the grid, derivatives along the real axis by
/// second-order central differences (`n ≤ 4`).
pub fn z_seminorm(s: &SpectralSamples, m: u32, n: usize) -> Result<f64> {
    const STENCILS: [&[f64]; 5] = [
        &[1.0],
        &[-0.5, 0.0, 0.5],
        &[1.0, -2.0, 1.0],
        &[-0.5, 1.0, 0.0, -1.0, 0.5],
        &[1.0, -4.0, 6.0, -4.0, 1.0],
    ];
    if n > 4 {
        return Err(Error::Domain(format!("derivative order {n} above 4")));
    }
    let nx = s.re.len();
    let stencil = STENCILS[n];
    let half = stencil.len() / 2;
    if nx < stencil.len() || (n > 0 && nx < 3) {
        return Err(Error::Grid(format!(
            "{nx} real nodes cannot support order-{n} differences"
        )));
    }
    let h = if nx > 1 { uniform_step(&s.re, "real")? } else { 1.0 };
    let scale = h.powi(n as i32);
    let mut worst: f64 = 0.0;
    for j in 0..s.im.len() {
        for i in half..nx - half {
            let d: Complex64 = stencil
                .iter()
                .enumerate()
                .map(|(k, w)| s.at(i + k - half, j) * *w)
                .sum::<Complex64>()
                / scale;
            let lambda = Complex64::new(s.re[i], s.im[j]);
            worst = worst.max((lambda.powu(m) * d).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::radial_integrate;
    use crate::spherical::xi_radial;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn transform_of_zero() {
        let v = hc_value(&RadialProfile::zero(), SpectralParam::real(1.0), &q()).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn transform_is_weyl_invariant() {
        let f = RadialProfile::gaussian(1.0).unwrap();
        for l in [SpectralParam::real(1.5), SpectralParam::new(2.0, 0.7)] {
            let a = hc_value(&f, l, &q()).unwrap();
            let b = hc_value(&f, l.weyl(), &q()).unwrap();
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn transform_at_zero_matches_xi_integral() {
        let f = RadialProfile::gaussian(1.0).unwrap();
        let v = hc_transform(&f, SpectralParam::ZERO, &q()).unwrap();
        let oracle = radial_integrate(|t: f64| f.eval(t) * xi_radial(t) * (2.0 * t).sinh(), 12.0, 240, 16);
        assert!((v.value.re - oracle.value).abs() < 1e-12);
        assert!(v.value.im.abs() < 1e-15);
        assert!(v.error < 1e-12);
    }

    #[test]
    fn cauchy_decay_respects_strip() {
        let f = RadialProfile::cauchy_decay(3.0).unwrap();
        assert!(hc_value(&f, SpectralParam::new(1.0, 1.5), &q()).is_ok());
        assert!(hc_value(&f, SpectralParam::new(1.0, 2.5), &q()).is_err());
    }

    #[test]
    fn tube_examples() {
        assert_eq!(tube_for_p(2.0).unwrap().epsilon, 0.0);
        assert_eq!(tube_for_p(1.0).unwrap().epsilon, 1.0);
        assert!((tube_for_p(2.0 / 3.0).unwrap().epsilon - 2.0).abs() < 1e-15);
        assert!(tube_for_p(0.0).is_err() && tube_for_p(2.5).is_err());
        let d = TubeDomain { epsilon: 1.0 };
        assert!(in_tube(SpectralParam::real(7.0), TubeDomain { epsilon: 0.0 }));
        assert!(in_tube(SpectralParam::new(1.0, 0.5), d));
        assert!(!in_tube(SpectralParam::new(1.0, 1.5), d));
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn holomorphy_residual_examples() {
        let sq = SpectralSamples::sample(grid(-2.0, 2.0, 9), grid(-1.0, 1.0, 5), "sq", |l| {
            Ok(l.as_complex() * l.as_complex())
        })
        .unwrap();
        assert!(holomorphy_residual(&sq).unwrap() < 1e-12);
        let cj = SpectralSamples::sample(grid(-2.0, 2.0, 9), grid(-1.0, 1.0, 5), "conj", |l| {
            Ok(l.as_complex().conj())
        })
        .unwrap();
        assert!((holomorphy_residual(&cj).unwrap() - 2.0).abs() < 1e-12);
        let thin = SpectralSamples::sample(grid(-1.0, 1.0, 5), vec![0.0, 1.0], "x", |_| {
            Ok(Complex64::new(1.0, 0.0))
        })
        .unwrap();
        assert!(matches!(holomorphy_residual(&thin), Err(Error::Grid(_))));
    }

    #[test]
    fn z_seminorm_examples() {
        let ones =
            SpectralSamples::sample(grid(-3.0, 3.0, 61), vec![0.0], "one", |_| Ok(Complex64::new(1.0, 0.0))).unwrap();
        assert!((z_seminorm(&ones, 2, 0).unwrap() - 9.0).abs() < 1e-12);
        let gauss = SpectralSamples::sample(grid(-4.0, 4.0, 801), vec![0.0], "g", |l| {
            Ok(Complex64::new((-l.re * l.re).exp(), 0.0))
        })
        .unwrap();
        // sup |2λ³e^{-λ²}| at λ² = 3/2
        let exact = 2.0 * 1.5f64.powf(1.5) * (-1.5f64).exp();
        let v = z_seminorm(&gauss, 2, 1).unwrap();
        assert!((v / exact - 1.0).abs() < 0.05, "{v} vs {exact}");
    }

    #[test]
    fn csv_round_trip() {
        let s =
            SpectralSamples::sample(grid(0.0, 1.0, 3), grid(-0.5, 0.5, 2), "t", |l| Ok(l.as_complex().exp())).unwrap();
        let text = s.to_csv();
        assert!(text.starts_with("re_lambda,im_lambda,re_value,im_value\n"));
        let back = SpectralSamples::from_csv(&text).unwrap();
        assert_eq!(back.values(), s.values());
    }
}
