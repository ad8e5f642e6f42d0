//! Schwartz seminorms `μ_{a,b;r}`, their recentred versions `μ^{(x)}`, the
//! strong inequality, the integral `d(x)`, and the growth of `Ξ`.
//!
//! Every supremand in scope is `K`-bi-invariant in the function variable,
//! so sups over `G` are sups over the radial coordinate (and, for the
//! recentred seminorms, one relative angle). Suprema are taken on a grid
//! and polished by golden-section search around the best grid points.

use num_complex::Complex64;

use crate::convolution::ln_cosh;
use crate::error::{Error, Result};
use crate::group::{haar_integrate_radial, radial_integrate_complete_at, GroupElement};
use crate::profile::{central_difference, RadialProfile};
use crate::quadrature::{Integral, QuadratureSpec, ZonalRule};
use crate::spherical::{phi_radial, xi_growth, xi_scaled, SpectralParam};
use crate::transform::hc_value;

/// Orders of `H₁`-derivatives on the left and right, polynomial weight `r`
/// and Schwartz exponent `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormIndex {
    pub a_order: usize,
    pub b_order: usize,
    pub r: u32,
    pub p: f64,
}

impl SeminormIndex {
    pub fn new(a_order: usize, b_order: usize, r: u32, p: f64) -> Result<Self> {
        if a_order + b_order > 4 {
            return Err(Error::Domain(format!("derivative order {} above 4", a_order + b_order)));
        }
        if r > 12 {
            return Err(Error::Domain(format!("weight r = {r} above 12")));
        }
        if !(p > 0.0 && p <= 2.0) {
            return Err(Error::Domain(format!("p = {p} outside (0, 2]")));
        }
        Ok(Self { a_order, b_order, r, p })
    }

    /// `(0, 0, r, 2)`.
    pub fn weight(r: u32) -> Self {
        Self {
            a_order: 0,
            b_order: 0,
            r,
            p: 2.0,
        }
    }

    pub fn order(&self) -> usize {
        self.a_order + self.b_order
    }
}

/// Outcome of a fitted inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityVerdict {
    pub holds: bool,
    pub fitted_constant: f64,
    pub worst_point: f64,
    pub margin: f64,
}

impl InequalityVerdict {
    fn from_margin(fitted_constant: f64, worst_point: f64, margin: f64) -> Self {
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        Self {
            holds: margin >= -1e-8,
            fitted_constant,
            worst_point,
            margin,
        }
    }
}

/// Spacing of the radial sup grid.
pub const SUP_STEP: f64 = 0.02;
/// A maximizer in this final fraction of the grid signals divergence; a
/// quarter leaves room for oscillating supremands with growing envelope.
pub const SENTINEL_FRACTION: f64 = 0.25;

/// Finite-difference step for derivative order `n`.
fn fd_step(n: usize) -> f64 {
    match n {
        0 | 1 => 1e-3,
        2 => 5e-3,
        3 => 1e-2,
        _ => 2e-2,
    }
}

/// `|dⁿ/dtⁿ f(t)|`.
pub fn derivative_modulus(f: &RadialProfile, n: usize, t: f64) -> f64 {
    f.derivative(n, t, fd_step(n)).abs()
}

/// `|dⁿ/dtⁿ g(t)|` for complex `g`.
pub fn complex_derivative_modulus(g: &impl Fn(f64) -> Complex64, n: usize, t: f64) -> f64 {
    let re = central_difference(&|s| g(s).re, n, t, fd_step(n));
    let im = central_difference(&|s| g(s).im, n, t, fd_step(n));
    re.hypot(im)
}

/// `ln(Ξ(a_t)^{-κ})` for `t ≥ 0`.
fn ln_xi_power(t: f64, kappa: f64) -> f64 {
    kappa * (t - xi_scaled(t).ln())
}

/// Location and value of a supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Supremum {
    pub value: f64,
    pub argmax: f64,
    /// The maximizer sits at the end of the grid.
    pub at_boundary: bool,
}

impl Supremum {
    /// The value, or `+∞` when the supremand was still growing at the end.
    pub fn with_sentinel(&self) -> f64 {
        if self.at_boundary {
            f64::INFINITY
        } else {
            self.value
        }
    }
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Sup of `exp(ln_s(t))` over `[0, end]`: grid scan, then golden-section
/// polish around the three largest grid local maxima.
pub fn radial_sup(ln_s: impl Fn(f64) -> f64, end: f64, step: f64) -> Supremum {
    let n = (end / step).ceil().max(2.0) as usize;
    let h = end / n as f64;
    let values: Vec<f64> = (0..=n).map(|i| ln_s(i as f64 * h)).collect();
    let best = argmax(&values);
    if values[best] == f64::NEG_INFINITY {
        return Supremum {
            value: 0.0,
            argmax: 0.0,
            at_boundary: false,
        };
    }
    let at_boundary = best as f64 >= (1.0 - SENTINEL_FRACTION) * n as f64;
    let mut peaks: Vec<usize> = (0..=n)
        .filter(|&i| {
            let left = if i == 0 { f64::NEG_INFINITY } else { values[i - 1] };
            let right = if i == n { f64::NEG_INFINITY } else { values[i + 1] };
            values[i] >= left && values[i] >= right && values[i] > f64::NEG_INFINITY
        })
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    peaks.truncate(3);
    let (mut t_best, mut v_best) = (best as f64 * h, values[best]);
    for i in peaks {
        let a = if i == 0 { 0.0 } else { (i - 1) as f64 * h };
        let b = if i == n { end } else { (i + 1) as f64 * h };
        let (t, v) = golden_max(&ln_s, a, b);
        if v > v_best {
            t_best = t;
            v_best = v;
        }
    }
    Supremum {
        value: v_best.exp(),
        argmax: t_best,
        at_boundary,
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// `sup_t |D^{a+b} F(t)|·Ξ(a_t)^{-2/p}(1+t)^r` for a radial function given
/// through its derivative modulus.
pub fn radial_seminorm(d: impl Fn(f64) -> f64, idx: &SeminormIndex, q: &QuadratureSpec) -> Supremum {
    let kappa = 2.0 / idx.p;
    let r = idx.r as f64;
    radial_sup(|t| d(t).ln() + ln_xi_power(t, kappa) + r * t.ln_1p(), q.t_max, SUP_STEP)
}

/// `μ_{a,b;r}(f)`, or `+∞` when the supremand is still increasing at
/// `t_max`.
pub fn seminorm(f: &RadialProfile, idx: &SeminormIndex, q: &QuadratureSpec) -> f64 {
    seminorm_sup(f, idx, q).with_sentinel()
}

pub fn seminorm_sup(f: &RadialProfile, idx: &SeminormIndex, q: &QuadratureSpec) -> Supremum {
    let n = idx.order();
    radial_seminorm(|t| derivative_modulus(f, n, t), idx, q)
}

/// `σ(a_{-s} k(ψ) a_τ)`.
fn shifted_sigma(s: f64, psi: f64, tau: f64) -> f64 {
    (GroupElement::diagonal(-s) * GroupElement::rotation(psi) * GroupElement::diagonal(tau)).sigma()
}

/// Angular grid for `ψ`; `σ` is `π`-periodic in `ψ`.
const PSI_NODES: usize = 32;

/// `sup_{s,ψ}` of `exp(ln_d(s) + ln_w(σ(a_{-s}k(ψ)a_τ)))` over
/// `s ∈ [0, end]`.
fn shifted_sup(ln_d: &impl Fn(f64) -> f64, ln_w: &impl Fn(f64) -> f64, tau: f64, end: f64, step: f64) -> Supremum {
    if tau == 0.0 {
        return radial_sup(|s| ln_d(s) + ln_w(s), end, step);
    }
    let joint = |s: f64, psi: f64| ln_d(s) + ln_w(shifted_sigma(s, psi, tau));
    let n = (end / step).ceil().max(2.0) as usize;
    let h = end / n as f64;
    let dpsi = std::f64::consts::PI / PSI_NODES as f64;
    let (mut bi, mut bj, mut bv) = (0, 0, f64::NEG_INFINITY);
    for i in 0..=n {
        let ld = ln_d(i as f64 * h);
        if ld == f64::NEG_INFINITY {
            continue;
        }
        for j in 0..PSI_NODES {
            let v = ld + ln_w(shifted_sigma(i as f64 * h, j as f64 * dpsi, tau));
            if v > bv {
                (bi, bj, bv) = (i, j, v);
            }
        }
    }
    if bv == f64::NEG_INFINITY {
        return Supremum {
            value: 0.0,
            argmax: 0.0,
            at_boundary: false,
        };
    }
    let at_boundary = bi as f64 >= (1.0 - SENTINEL_FRACTION) * n as f64;
    let (mut s, mut psi) = (bi as f64 * h, bj as f64 * dpsi);
    for _ in 0..3 {
        let (s_new, v) = golden_max(&|x| joint(x, psi), (s - h).max(0.0), (s + h).min(end));
        if v > bv {
            (s, bv) = (s_new, v);
        }
        let (psi_new, v) = golden_max(&|y| joint(s, y), psi - dpsi, psi + dpsi);
        if v > bv {
            (psi, bv) = (psi_new, v);
        }
    }
    Supremum {
        value: bv.exp(),
        argmax: s,
        at_boundary,
    }
}

/// `μ^{(x)}_{a,b;r}(f) = sup_y |f(a;y;b)|·Ξ(y⁻¹x)^{-2/p}(1+σ(y⁻¹x))^r`;
/// `+∞` when the supremand is still increasing at `t_max`.
pub fn general_seminorm(f: &RadialProfile, x: &GroupElement, idx: &SeminormIndex, q: &QuadratureSpec) -> Result<f64> {
    Ok(general_seminorm_sup(f, x, idx, q, q.t_max, SUP_STEP)?.with_sentinel())
}

fn general_seminorm_sup(
    f: &RadialProfile,
    x: &GroupElement,
    idx: &SeminormIndex,
    _q: &QuadratureSpec,
    end: f64,
    step: f64,
) -> Result<Supremum> {
    let tau = x.sigma();
    if tau > 5.0 {
        return Err(Error::Domain(format!("σ(x) = {tau} above 5")));
    }
    let n = idx.order();
    let kappa = 2.0 / idx.p;
    let r = idx.r as f64;
    let ln_d = |s: f64| derivative_modulus(f, n, s).ln();
    let ln_w = |sigma: f64| ln_xi_power(sigma, kappa) + r * sigma.ln_1p();
    Ok(shifted_sup(&ln_d, &ln_w, tau, end, step))
}

/// `d(x) = ∫_G Ξ²(y⁻¹x)(1+σ(y⁻¹x))^{-r} dy`, including the algebraic tail
/// beyond `t_max`. Left invariance of the Haar measure makes this equal to
/// `d(e)`; the computation does not use that.
pub fn d_integral(x: &GroupElement, r: u32, q: &QuadratureSpec) -> Result<f64> {
    if r < 4 {
        return Err(Error::Domain(format!("d(x) diverges for r = {r} < 4")));
    }
    let tau = x.sigma();
    let r = r as f64;
    let refinement = ZonalRule::refinement_for(0.0, q.k_nodes);
    let w = |s: f64| -> f64 {
        let ln_ratio = ln_cosh(2.0 * (s - tau)) - ln_cosh(2.0 * (s + tau));
        let rule = ZonalRule::new(ln_ratio, refinement);
        let scale = (-2.0 * s).exp();
        let mean = rule.mean(|node| {
            // z = a_{-s} k(ψ) a_τ, rescaled by e^{-s}
            let m = GroupElement::rotation(node.theta) * GroupElement::diagonal(tau);
            let (a, b, c, d) = (scale * m.m11, scale * m.m12, m.m21, m.m22);
            let rt = (0.5 * (a - d)).hypot(0.5 * (c + b));
            let excess = (rt + (rt * rt + scale).sqrt()).ln(); // σ - s
            let sigma = s + excess;
            xi_scaled(sigma).powi(2) * (1.0 + sigma).powf(-r) * (-2.0 * excess).exp()
        });
        mean * 0.5 * -(-4.0 * s).exp_m1()
    };
    let v = radial_integrate_complete_at(w, tau, q);
    if !v.is_finite() {
        return Err(Error::Domain("d(x) quadrature produced a non-finite value".into()));
    }
    Ok(v)
}

/// Least `c_r` with `|f(y)| ≤ c_r Ξ(y⁻¹x)(1+σ(y⁻¹x))^{-r}` on the grid, and
/// whether it is stable when the grid is doubled in both density and
/// extent (ratio ≤ 1.05).
pub fn strong_inequality_check(
    f: &RadialProfile,
    x: &GroupElement,
    r: u32,
    q: &QuadratureSpec,
) -> Result<InequalityVerdict> {
    if r > 10 {
        return Err(Error::Domain(format!("r = {r} above 10")));
    }
    let idx = SeminormIndex::weight(r);
    let coarse = general_seminorm_sup(f, x, &idx, q, q.t_max, SUP_STEP)?;
    let fine = general_seminorm_sup(f, x, &idx, q, 2.0 * q.t_max, 0.5 * SUP_STEP)?;
    let ratio = if fine.value == 0.0 && coarse.value == 0.0 {
        1.0
    } else {
        fine.value / coarse.value
    };
    Ok(InequalityVerdict::from_margin(fine.value, fine.argmax, 1.05 - ratio))
}

/// Weight shift `r₀` in the convolution seminorm estimate.
pub const R0: u32 = 4;

/// `μ_{a,b;r}(f∗φ_λ) ≤ c·μ_{0,b;r+r₀}(f)·μ_{a,0;r}(φ_λ)` with `r₀ = 4` and
/// `c = d(e)`; `f∗φ_λ = f̂(λ)φ_λ` is evaluated through the product formula.
pub fn convolution_seminorm_check(
    f: &RadialProfile,
    lambda: SpectralParam,
    idx: &SeminormIndex,
    q: &QuadratureSpec,
) -> Result<InequalityVerdict> {
    if lambda.im.abs() > 1.0 {
        return Err(Error::Domain(format!("|Im λ| = {} above 1", lambda.im.abs())));
    }
    let l = lambda.as_complex();
    let fhat = hc_value(f, lambda, q)?;
    let k = q.k_nodes;
    let phi_t = |t: f64| phi_radial(l, t, k);
    let s_t = |t: f64| fhat * phi_radial(l, t, k);
    let lhs = radial_seminorm(|t| complex_derivative_modulus(&s_t, idx.order(), t), idx, q);
    let f_idx = SeminormIndex {
        a_order: 0,
        r: idx.r + R0,
        ..*idx
    };
    let phi_idx = SeminormIndex { b_order: 0, ..*idx };
    let mu_f = seminorm(f, &f_idx, q);
    let mu_phi =
        radial_seminorm(|t| complex_derivative_modulus(&phi_t, phi_idx.order(), t), &phi_idx, q).with_sentinel();
    let c = d_integral(&GroupElement::identity(), R0, q)?;
    let rhs = if mu_f == 0.0 || mu_phi == 0.0 {
        0.0
    } else {
        c * mu_f * mu_phi
    };
    let lhs_value = lhs.with_sentinel();
    let fitted = if lhs_value.is_infinite() {
        f64::INFINITY
    } else if rhs > 0.0 {
        lhs_value / rhs
    } else {
        0.0
    };
    Ok(InequalityVerdict::from_margin(
        fitted,
        lhs.argmax,
        rhs * (1.0 + 1e-6) - lhs_value,
    ))
}

/// Fitted `(c, d)` in `1 ≤ Ξ(a_t)e^t ≤ c(1+t)^d` on `[0, T]`.
pub fn xi_growth_fit(t_end: f64) -> Result<(f64, f64)> {
    let g = xi_growth(t_end, 401)?;
    Ok((g.c, g.d))
}

/// `∫_G |f|²`.
pub fn l2_norm_squared(f: &RadialProfile, q: &QuadratureSpec) -> Integral<f64> {
    haar_integrate_radial(|t| f.eval(t).powi(2), q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn index_caps() {
        assert!(SeminormIndex::new(3, 2, 0, 2.0).is_err());
        assert!(SeminormIndex::new(0, 0, 13, 2.0).is_err());
        assert!(SeminormIndex::new(0, 0, 0, 0.0).is_err());
        assert!(SeminormIndex::new(2, 2, 12, 0.5).is_ok());
    }

    #[test]
    fn zero_has_zero_seminorm() {
        let z = RadialProfile::zero();
        assert_eq!(seminorm(&z, &SeminormIndex::weight(4), &q()), 0.0);
        let a1 = GroupElement::diagonal(1.0);
        assert_eq!(general_seminorm(&z, &a1, &SeminormIndex::weight(4), &q()).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_seminorm_is_finite() {
        let g = RadialProfile::gaussian(1.0).unwrap();
        let v = seminorm(&g, &SeminormIndex::weight(0), &q());
        assert!(v.is_finite() && v >= 1.0);
    }

    #[test]
    fn xi_itself_triggers_sentinel() {
        let f = RadialProfile::custom(
            "xi",
            crate::profile::Decay::Exponential(1.0),
            crate::spherical::xi_radial,
        );
        assert_eq!(seminorm(&f, &SeminormIndex::weight(2), &q()), f64::INFINITY);
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, v) = golden_max(&|t: f64| -(t - 0.3).powi(2), 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-7 && v.abs() < 1e-14);
    }

    #[test]
    fn d_is_translation_invariant() {
        let de = d_integral(&GroupElement::identity(), 4, &q()).unwrap();
        let d1 = d_integral(&GroupElement::diagonal(1.0), 4, &q()).unwrap();
        assert!(de.is_finite() && de > 0.0);
        assert!((d1 / de - 1.0).abs() < 1e-6, "{de} {d1}");
    }

    #[test]
    fn d_rejects_small_r() {
        assert!(d_integral(&GroupElement::identity(), 3, &q()).is_err());
    }
}
