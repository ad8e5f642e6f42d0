//! Spherical convolutions `s_{λ,f}(x) = (f ∗ φ_λ)(x)`, their Taylor data
//! along one-parameter subgroups, the normalization `κ`, and the
//! normalized convolution transform.

use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{Checked, Error, Result, Warning};
use crate::group::{GroupElement, TangentDirection};
use crate::profile::RadialProfile;
use crate::quadrature::{split_gauss, QuadratureSpec, ZonalRule, RADIAL_ORDER};
use crate::schwartz::{d_integral, seminorm, SeminormIndex};
use crate::spherical::{phi, phi_radial, PhiTable, SpectralParam};
use crate::transform::{hc_value, panel_width_for, transform_radius, SpectralSamples};

/// How `s_{λ,f}(x)` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// `∫_G f(y) φ_λ(y⁻¹x) dy` over polar coordinates of `y`.
    Direct,
    /// `f̂(λ)·φ_λ(x)`.
    ProductFormula,
}

/// Strategies disagreeing by more than this raise a warning.
pub const STRATEGY_WARN: f64 = 1e-4;
/// Spherical function values below this are treated as vanishing divisors.
pub const SMALL_DIVISOR: f64 = 1e-6;

/// `x ↦ s_{λ,f}(x)` for a bi-invariant `f`.
#[derive(Debug, Clone)]
pub struct SphericalConvolution {
    pub lambda: SpectralParam,
    pub profile: RadialProfile,
    pub strategy: Strategy,
    cache: Arc<Mutex<Cache>>,
}

#[derive(Debug, Default)]
struct Cache {
    transform: Option<(QuadratureSpec, Complex64)>,
    table: Option<(usize, Arc<PhiTable>)>,
}

impl SphericalConvolution {
    pub fn new(lambda: SpectralParam, profile: RadialProfile, strategy: Strategy) -> Self {
        Self {
            lambda,
            profile,
            strategy,
            cache: Arc::default(),
        }
    }

    pub fn with_strategy(&self, strategy: Strategy) -> Self {
        Self {
            strategy,
            ..self.clone()
        }
    }

    /// `f̂(λ)`, cached per quadrature spec.
    pub fn transform(&self, q: &QuadratureSpec) -> Result<Complex64> {
        if let Some((spec, v)) = self.cache.lock().expect("cache lock").transform {
            if spec == *q {
                return Ok(v);
            }
        }
        let v = hc_value(&self.profile, self.lambda, q)?;
        self.cache.lock().expect("cache lock").transform = Some((*q, v));
        Ok(v)
    }

    fn table(&self, reach: f64, q: &QuadratureSpec) -> Arc<PhiTable> {
        let mut cache = self.cache.lock().expect("cache lock");
        if let Some((k, table)) = &cache.table {
            if *k == q.k_nodes && table.t_max() >= reach {
                return table.clone();
            }
        }
        // leave headroom so nearby points reuse the table
        let table = Arc::new(PhiTable::new(self.lambda, reach + 2.0, q.k_nodes));
        cache.table = Some((q.k_nodes, table.clone()));
        table
    }

    pub fn evaluate(&self, x: &GroupElement, q: &QuadratureSpec) -> Result<Complex64> {
        match self.strategy {
            Strategy::ProductFormula => Ok(self.transform(q)? * phi(self.lambda, x, q)),
            Strategy::Direct => self.direct(x, q),
        }
    }

    /// Evaluates with both strategies and warns when they disagree.
    pub fn evaluate_checked(&self, x: &GroupElement, q: &QuadratureSpec) -> Result<Checked<Complex64>> {
        let value = self.evaluate(x, q)?;
        let other = self
            .with_strategy(match self.strategy {
                Strategy::Direct => Strategy::ProductFormula,
                Strategy::ProductFormula => Strategy::Direct,
            })
            .evaluate(x, q)?;
        let difference = (value - other).norm();
        let mut warnings = Vec::new();
        if difference > STRATEGY_WARN {
            warnings.push(Warning::StrategyDisagreement { difference });
        }
        Ok(Checked::with_warnings(value, warnings))
    }

    /// `∫_G f(y)φ_λ(y⁻¹x) dy` with `y = k(θ₁)a_s k(θ₂)`. The integrand does
    /// not depend on `θ₂`; the `θ₁`-mean depends on `x = k(α)a_τ k(β)` only
    /// through `ψ = α - θ₁` and runs on the zonal rule in `ψ`. At points of
    /// `K` the angular means are exact and the integral is the transform.
    fn direct(&self, x: &GroupElement, q: &QuadratureSpec) -> Result<Complex64> {
        let pol = x.polar();
        if pol.t == 0.0 {
            return self.transform(q);
        }
        let l = self.lambda.as_complex();
        if self.lambda.im.abs() >= self.profile.tube_margin() {
            return Err(Error::Domain(format!(
                "|Im λ| = {} outside the convergence strip of {}",
                self.lambda.im.abs(),
                self.profile.label()
            )));
        }
        let end = transform_radius(&self.profile, l, q);
        if end <= 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let tau = pol.t;
        let table = self.table(end + tau, q);
        let refinement = ZonalRule::refinement_for(l.re, q.k_nodes);
        let integrand = |s: f64| -> Complex64 {
            let ln_ratio = ln_cosh(2.0 * (s - tau)) - ln_cosh(2.0 * (s + tau));
            let rule = ZonalRule::new(ln_ratio, refinement);
            let a_minus = GroupElement::diagonal(-s);
            let mean = rule.mean(|n| {
                let theta1 = pol.theta1 - n.theta;
                let z = a_minus * GroupElement::rotation(-theta1) * *x;
                table.eval(z.sigma())
            });
            mean * (self.profile.eval(s) * (2.0 * s).sinh())
        };
        let panels = (end / panel_width_for(l, q)).ceil().max(1.0) as usize;
        let cuts = self.profile.breakpoints();
        Ok(split_gauss(integrand, 0.0, end, &cuts, end / panels as f64, RADIAL_ORDER).0)
    }
}

/// `ln cosh x` without overflow.
pub(crate) fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Base finite-difference step for Taylor coefficients of order `n`.
pub fn taylor_step(n: usize) -> f64 {
    if n <= 4 {
        1e-2
    } else {
        5e-2
    }
}

/// Largest supported derivative order.
pub const MAX_ORDER: usize = 8;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `n`-th central difference `Δ_h^n g(0)/h^n` on nodes `(n/2 - k)h`.
fn central_nth(g: &impl Fn(f64) -> Result<Complex64>, n: usize, h: f64) -> Result<(Complex64, f64)> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale: f64 = 0.0;
    for k in 0..=n {
        let c = binomial(n, k) * if k % 2 == 0 { 1.0 } else { -1.0 };
        let v = g((n as f64 / 2.0 - k as f64) * h)?;
        scale = scale.max(v.norm());
        acc += v * c;
    }
    Ok((acc / h.powi(n as i32), scale))
}

/// `dⁿ/duⁿ s_{λ,f}(x·exp(uX))` at `u = 0`: central differences with one
/// Richardson level (`h = 1e-2` for `n ≤ 4`, `5e-2` above).
pub fn taylor_coefficient(
    s: &SphericalConvolution,
    x: &GroupElement,
    dir: &TangentDirection,
    n: usize,
    q: &QuadratureSpec,
) -> Result<Checked<Complex64>> {
    if n > MAX_ORDER {
        return Err(Error::Domain(format!("derivative order {n} above {MAX_ORDER}")));
    }
    let mut warnings = Vec::new();
    if dir.norm() > 2.0 {
        warnings.push(Warning::LargeTangent { norm: dir.norm() });
    }
    if n == 0 {
        return Ok(Checked::with_warnings(s.evaluate(x, q)?, warnings));
    }
    let g = |u: f64| s.evaluate(&(*x * dir.scaled(u).exp()), q);
    let h = taylor_step(n);
    let (coarse, scale) = central_nth(&g, n, h)?;
    let (fine, _) = central_nth(&g, n, 0.5 * h)?;
    let value = (fine * 4.0 - coarse) / 3.0;
    // Richardson error proxy plus rounding amplified by the stencil
    let rounding = 1e-13 * scale * 2f64.powi(n as i32) / (0.5 * h).powi(n as i32);
    let estimate = (fine - coarse).norm() / 3.0 + rounding;
    let reference = value.norm().max(scale);
    if estimate > 1e-4 * reference {
        warnings.push(Warning::NumericalNoise { order: n, estimate });
    }
    Ok(Checked::with_warnings(value, warnings))
}

/// `Σ_{n=0}^{N} tⁿ/n!·[X̃ⁿ s](x)`.
pub fn taylor_partial_sum(
    s: &SphericalConvolution,
    x: &GroupElement,
    dir: &TangentDirection,
    t: f64,
    order: usize,
    q: &QuadratureSpec,
) -> Result<Checked<Complex64>> {
    if t.abs() > 1.0 || order > MAX_ORDER {
        return Err(Error::Domain(format!(
            "need |t| ≤ 1 and N ≤ {MAX_ORDER}, got t = {t}, N = {order}"
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut warnings = Vec::new();
    let mut weight = 1.0;
    for n in 0..=order {
        if n > 0 {
            weight *= t / n as f64;
        }
        if weight == 0.0 {
            break;
        }
        let c = taylor_coefficient(s, x, dir, n, q)?;
        sum += c.value * weight;
        for w in c.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    Ok(Checked::with_warnings(sum, warnings))
}

/// Tolerance on the spread of witness ratios in [`kappa`].
pub const KAPPA_TOLERANCE: f64 = 1e-5;

/// `κ(λ, X) = s_{λ,f}(exp X)/f̂(λ)` from each witness (direct strategy);
/// fails when the witnesses disagree, since `κ` must not depend on `f`.
pub fn kappa(
    lambda: SpectralParam,
    dir: &TangentDirection,
    witnesses: &[RadialProfile],
    q: &QuadratureSpec,
) -> Result<Complex64> {
    let ratios = kappa_ratios(lambda, dir, witnesses, q)?;
    let mut spread: f64 = 0.0;
    for a in &ratios {
        for b in &ratios {
            spread = spread.max((a - b).norm());
        }
    }
    if spread > KAPPA_TOLERANCE {
        return Err(Error::Inconsistency {
            spread,
            tolerance: KAPPA_TOLERANCE,
        });
    }
    Ok(ratios.iter().sum::<Complex64>() / ratios.len() as f64)
}

/// Per-witness ratios behind [`kappa`].
pub fn kappa_ratios(
    lambda: SpectralParam,
    dir: &TangentDirection,
    witnesses: &[RadialProfile],
    q: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    if witnesses.len() < 2 {
        return Err(Error::Domain("kappa needs at least two witnesses".into()));
    }
    let x = dir.exp();
    witnesses
        .iter()
        .map(|w| {
            let s = SphericalConvolution::new(lambda, w.clone(), Strategy::Direct);
            let fhat = s.transform(q)?;
            if fhat.norm() <= 1e-8 {
                return Err(Error::Domain(format!(
                    "witness {} has |f̂(λ)| = {:.3e} ≤ 1e-8",
                    w.label(),
                    fhat.norm()
                )));
            }
            Ok(s.evaluate(&x, q)? / fhat)
        })
        .collect()
}

/// `λ ↦ s_{λ,f}(x)/φ_λ(x)` on a rectangular grid; nodes where
/// `|φ_λ(x)| ≤ 1e-6` are flagged with a small-divisor warning.
pub fn convolution_transform(
    f: &RadialProfile,
    x: &GroupElement,
    re: Vec<f64>,
    im: Vec<f64>,
    strategy: Strategy,
    q: &QuadratureSpec,
) -> Result<Checked<SpectralSamples>> {
    let mut warnings = Vec::new();
    let samples = SpectralSamples::sample(re, im, format!("{} at x", f.label()), |l| {
        let s = SphericalConvolution::new(l, f.clone(), strategy).evaluate(x, q)?;
        let divisor = phi(l, x, q);
        if divisor.norm() <= SMALL_DIVISOR {
            warnings.push(Warning::SmallDivisor {
                lambda_re: l.re,
                lambda_im: l.im,
                divisor: divisor.norm(),
            });
            if divisor.norm() == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
        }
        Ok(s / divisor)
    })?;
    Ok(Checked::with_warnings(samples, warnings))
}

/// `φ_λ(exp X)`, the value `κ` must take.
pub fn kappa_expected(lambda: SpectralParam, dir: &TangentDirection, q: &QuadratureSpec) -> Complex64 {
    phi_radial(lambda.as_complex(), dir.exp().sigma(), q.k_nodes)
}

/// `d(x)·μ_{0,0;r}(f) - |s_{λ,f}(x)|`, nonnegative when the pointwise
/// convolution bound holds; `s` uses the direct strategy.
pub fn bound_margin(
    f: &RadialProfile,
    x: &GroupElement,
    lambda: SpectralParam,
    r: u32,
    q: &QuadratureSpec,
) -> Result<f64> {
    if r < 4 {
        return Err(Error::Domain(format!("bound needs r ≥ 4, got {r}")));
    }
    let mu = seminorm(f, &SeminormIndex::weight(r), q);
    let s = SphericalConvolution::new(lambda, f.clone(), Strategy::Direct).evaluate(x, q)?;
    if mu == 0.0 {
        return Ok(-s.norm());
    }
    Ok(d_integral(x, r, q)? * mu - s.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn gauss() -> RadialProfile {
        RadialProfile::gaussian(1.0).unwrap()
    }

    #[test]
    fn identity_gives_transform() {
        let l = SpectralParam::real(1.0);
        for strategy in [Strategy::Direct, Strategy::ProductFormula] {
            let s = SphericalConvolution::new(l, gauss(), strategy);
            let v = s.evaluate(&GroupElement::identity(), &q()).unwrap();
            assert_eq!(v, hc_value(&gauss(), l, &q()).unwrap());
        }
    }

    #[test]
    fn zero_profile_gives_zero() {
        let s = SphericalConvolution::new(SpectralParam::real(1.0), RadialProfile::zero(), Strategy::Direct);
        let v = s.evaluate(&GroupElement::diagonal(1.0), &q()).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn strategies_agree_at_a2() {
        let s = SphericalConvolution::new(SpectralParam::real(1.0), gauss(), Strategy::Direct);
        let x = GroupElement::diagonal(2.0);
        let direct = s.evaluate(&x, &q()).unwrap();
        let product = s.with_strategy(Strategy::ProductFormula).evaluate(&x, &q()).unwrap();
        assert!((direct - product).norm() < 1e-10, "{direct} vs {product}");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 4), 70.0);
        assert_eq!(binomial(5, 0), 1.0);
    }

    #[test]
    fn kappa_at_minus_i_rho_is_one() {
        let ws = [gauss(), RadialProfile::gaussian(2.0).unwrap()];
        let k = kappa(
            SpectralParam::MINUS_I_RHO,
            &TangentDirection::new(0.2, 0.1, -0.3),
            &ws,
            &q(),
        )
        .unwrap();
        assert!((k - 1.0).norm() < 1e-10);
    }

    #[test]
    fn kappa_needs_two_witnesses() {
        let r = kappa(SpectralParam::real(1.0), &TangentDirection::H1, &[gauss()], &q());
        assert!(r.is_err());
    }
}
