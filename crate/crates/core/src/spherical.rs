//! Elementary spherical functions `φ_λ`, the gauge `Ξ = φ₀`, the radial
//! Casimir check and the c-function extracted from large-`t` asymptotics.
//!
//! `φ_λ(x) = ∫_K e^{(iλ-1)H(xk)} dk`. For `x = a_t` the Iwasawa height of
//! `a_t k(θ)` is `½ ln Q(θ)` with `Q = e^{2t}cos²θ + e^{-2t}sin²θ`, so
//! `φ_λ(a_t)` is the K-mean of `Q^{(iλ-1)/2}`, evaluated with the zonal
//! rule of [`crate::quadrature::ZonalRule`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Checked, Error, Result, Warning};
use crate::group::GroupElement;
use crate::quadrature::{circle_mean, log_add_exp, EquispacedTable, QuadratureSpec, ZonalRule};

/// `λ = re + i·im`, identified with `𝔞*_ℂ` by evaluation on `H₁` (so `ρ = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParam {
    pub re: f64,
    pub im: f64,
}

impl SpectralParam {
    /// `λ = -iρ`, where `φ_λ ≡ 1`.
    pub const MINUS_I_RHO: SpectralParam = SpectralParam { re: 0.0, im: -1.0 };
    pub const ZERO: SpectralParam = SpectralParam { re: 0.0, im: 0.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn checked(re: f64, im: f64) -> Result<Self> {
        if re.is_finite() && im.is_finite() {
            Ok(Self { re, im })
        } else {
            Err(Error::Domain(format!("spectral parameter {re} + {im}i is not finite")))
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Action of the nontrivial Weyl element, `λ ↦ -λ`.
    pub fn weyl(&self) -> Self {
        Self {
            re: -self.re,
            im: -self.im,
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }
}

impl From<f64> for SpectralParam {
    fn from(re: f64) -> Self {
        Self::real(re)
    }
}

/// A fitted value of the c-function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CFunctionValue {
    pub value: Complex64,
    /// Relative RMS misfit of the two-exponential model.
    pub fit_residual: f64,
}

/// Both asymptotic coefficients from one fit: `c(λ)` and `c(-λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CFit {
    pub plus: Complex64,
    pub minus: Complex64,
    pub fit_residual: f64,
}

/// Accepted fit residual for [`CFunctionValue`].
pub const C_FIT_ACCEPT: f64 = 1e-4;
/// Fits worse than this raise [`Error::Fit`].
pub const C_FIT_REJECT: f64 = 1e-3;
const C_FIT_WINDOW: (f64, f64) = (8.0, 14.0);
const C_FIT_SAMPLES: usize = 61;

/// `φ_λ(a_t)`, evaluated at `|t|`.
///
/// Accurate to near working precision for `|Im λ| ≤ 1` and moderate
/// `Re λ`; `k_nodes` beyond 256 refines the rule proportionally.
pub fn phi_radial(lambda: Complex64, t: f64, k_nodes: usize) -> Complex64 {
    let t = t.abs();
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let nu = (Complex64::i() * lambda - 1.0) * 0.5;
    if nu == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    let rule = ZonalRule::new(4.0 * t, ZonalRule::refinement_for(lambda.re, k_nodes));
    let two_t = 2.0 * t;
    rule.mean(|n| {
        let ln_q = log_add_exp(two_t + n.ln_cos2, n.ln_sin2 - two_t);
        (nu * ln_q).exp()
    })
}

/// `φ_λ(g)`.
pub fn phi(lambda: SpectralParam, g: &GroupElement, q: &QuadratureSpec) -> Complex64 {
    phi_radial(lambda.as_complex(), g.sigma(), q.k_nodes)
}

/// `φ_λ(g)` with a refinement check against a rule of doubled density.
pub fn phi_checked(lambda: SpectralParam, g: &GroupElement, q: &QuadratureSpec) -> Checked<Complex64> {
    let t = g.sigma();
    let value = phi_radial(lambda.as_complex(), t, q.k_nodes);
    let refined = phi_radial(lambda.as_complex(), t, 2 * q.k_nodes.max(256));
    let estimate = (value - refined).norm();
    let mut warnings = Vec::new();
    if estimate > q.tol * value.norm().max(1.0) {
        warnings.push(Warning::Accuracy {
            estimate,
            tolerance: q.tol,
        });
    }
    Checked::with_warnings(value, warnings)
}

/// `φ_λ(g)` straight from the defining integral: equispaced nodes on `K`
/// and the Iwasawa height of `g·k(θ)`. Only accurate while `σ(g)` is
/// moderate, which is what makes it useful as an independent check.
pub fn phi_iwasawa(lambda: SpectralParam, g: &GroupElement, n: usize) -> Complex64 {
    let s = Complex64::i() * lambda.as_complex() - 1.0;
    circle_mean(
        |theta| (s * (*g * GroupElement::rotation(theta)).iwasawa_height()).exp(),
        n,
    )
}

/// `Ξ(a_t)·e^{|t|} = 1/AGM(1, e^{-2|t|})`, bounded by a linear function of `t`.
pub fn xi_scaled(t: f64) -> f64 {
    let t = t.abs();
    if t > 300.0 {
        // AGM(1, ε) = π / (2 ln(4/ε)) + O(ε²)
        return 2.0 / PI * (2.0 * t + 4f64.ln());
    }
    let mut a = 1.0;
    let mut b = (-2.0 * t).exp();
    for _ in 0..64 {
        if a - b <= 4e-16 * a {
            break;
        }
        let m = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = m;
    }
    1.0 / (0.5 * (a + b))
}

/// `Ξ(a_t) = φ₀(a_t)`.
pub fn xi_radial(t: f64) -> f64 {
    xi_scaled(t) * (-t.abs()).exp()
}

/// `Ξ(g) = φ₀(g)`; `φ₀` at `a_t` reduces to the mean of
/// `(e^{2t}cos²θ + e^{-2t}sin²θ)^{-1/2}`, which is `1/AGM(e^t, e^{-t})`.
pub fn xi(g: &GroupElement) -> f64 {
    xi_radial(g.sigma())
}

/// Radial Casimir `L = d²/dt² + 2coth(2t)·d/dt`; returns
/// `sup_t |Lφ_λ(a_t) + (λ² + 1)φ_λ(a_t)|` with derivatives from central
/// differences (`h = 1e-3`, one Richardson level).
pub fn radial_casimir_residual(lambda: SpectralParam, t_grid: &[f64], q: &QuadratureSpec) -> Result<f64> {
    const H: f64 = 1e-3;
    let l = lambda.as_complex();
    let f = |t: f64| phi_radial(l, t, q.k_nodes);
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        if !(0.1..=10.0).contains(&t) {
            return Err(Error::Domain(format!("Casimir check needs t in [0.1, 10], got {t}")));
        }
        let (d1, d2) = richardson_derivatives(&f, t, H);
        let lf = d2 + 2.0 / (2.0 * t).tanh() * d1;
        let res = (lf + (l * l + 1.0) * f(t)).norm();
        worst = worst.max(res);
    }
    Ok(worst)
}

/// First and second central differences with one Richardson level.
pub(crate) fn richardson_derivatives(f: &impl Fn(f64) -> Complex64, t: f64, h: f64) -> (Complex64, Complex64) {
    let f0 = f(t);
    let (p1, m1) = (f(t + h), f(t - h));
    let (p2, m2) = (f(t + 0.5 * h), f(t - 0.5 * h));
    let d1_h = (p1 - m1) / (2.0 * h);
    let d1_h2 = (p2 - m2) / h;
    let d2_h = (p1 - 2.0 * f0 + m1) / (h * h);
    let d2_h2 = (p2 - 2.0 * f0 + m2) / (0.25 * h * h);
    ((4.0 * d1_h2 - d1_h) / 3.0, (4.0 * d2_h2 - d2_h) / 3.0)
}

/// Least-squares fit of `φ_λ(a_t)e^t ≈ A e^{iλt} + B e^{-iλt}` over
/// `t ∈ [8, 14]`; `A = c(λ)`, `B = c(-λ)`.
pub fn c_fit(lambda: f64, q: &QuadratureSpec) -> Result<CFit> {
    if !lambda.is_finite() || lambda.abs() < 0.1 {
        return Err(Error::Domain(format!("c-function fit needs |λ| ≥ 0.1, got {lambda}")));
    }
    let l = Complex64::new(lambda, 0.0);
    let (a, b) = C_FIT_WINDOW;
    let samples: Vec<(f64, Complex64)> = (0..C_FIT_SAMPLES)
        .map(|j| {
            let t = a + (b - a) * j as f64 / (C_FIT_SAMPLES - 1) as f64;
            (t, phi_radial(l, t, q.k_nodes) * t.exp())
        })
        .collect();
    // normal equations for the basis (e^{iλt}, e^{-iλt})
    let mut g11 = 0.0;
    let mut g12 = Complex64::new(0.0, 0.0);
    let mut r1 = Complex64::new(0.0, 0.0);
    let mut r2 = Complex64::new(0.0, 0.0);
    for &(t, y) in &samples {
        let e = Complex64::from_polar(1.0, lambda * t);
        g11 += 1.0;
        g12 += e.conj() * e.conj();
        r1 += e.conj() * y;
        r2 += e * y;
    }
    // [[n, g12], [conj g12, n]] · (A, B) = (r1, r2)
    let det = g11 * g11 - g12.norm_sqr();
    let plus = (g11 * r1 - g12 * r2) / det;
    let minus = (g11 * r2 - g12.conj() * r1) / det;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(t, y) in &samples {
        let e = Complex64::from_polar(1.0, lambda * t);
        num += (y - plus * e - minus * e.conj()).norm_sqr();
        den += y.norm_sqr();
    }
    let fit_residual = (num / den).sqrt();
    if fit_residual > C_FIT_REJECT {
        return Err(Error::Fit {
            lambda,
            residual: fit_residual,
        });
    }
    Ok(CFit {
        plus,
        minus,
        fit_residual,
    })
}

/// `c(λ)` for real `λ` with `|λ| ≥ 0.1`.
pub fn c_function(lambda: SpectralParam, q: &QuadratureSpec) -> Result<CFunctionValue> {
    if !lambda.is_real() {
        return Err(Error::Domain("c-function fit is defined on the real line".into()));
    }
    let fit = c_fit(lambda.re, q)?;
    Ok(CFunctionValue {
        value: fit.plus,
        fit_residual: fit.fit_residual,
    })
}

/// `|∫_K φ_λ(g k h) dk − φ_λ(g)φ_λ(h)|`.
///
/// With `g = k(α₁)a_s k(α₂)` and `h = k(β₁)a_τ k(β₂)` the integrand depends
/// on `ψ = α₂ + θ + β₁` only through `cos²ψ`, so the K-mean runs on the
/// zonal rule in `ψ`; each node is still evaluated as the group product
/// `g·k(θ)·h`.
pub fn check_functional_equation(lambda: SpectralParam, g: &GroupElement, h: &GroupElement, q: &QuadratureSpec) -> f64 {
    let l = lambda.as_complex();
    let pg = g.polar();
    let ph = h.polar();
    let shift = pg.theta2 + ph.theta1;
    // σ(a_s k(ψ) a_τ) ranges over [|s-τ|, s+τ]
    let ln_ratio = 2.0 * (pg.t + ph.t) - 2.0 * (pg.t - ph.t).abs();
    let rule = ZonalRule::new(ln_ratio, ZonalRule::refinement_for(l.re, q.k_nodes));
    let lhs = rule.mean(|n| {
        let k = GroupElement::rotation(n.theta - shift);
        phi_radial(l, (*g * k * *h).sigma(), q.k_nodes)
    });
    let rhs = phi_radial(l, pg.t, q.k_nodes) * phi_radial(l, ph.t, q.k_nodes);
    (lhs - rhs).norm()
}

/// Fitted `(c, d)` with `Ξ(a_t)e^t ≤ c(1+t)^d` on `[0, T]`, plus the
/// smallest observed value of `Ξ(a_t)e^t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiGrowth {
    pub c: f64,
    pub d: f64,
    pub min_scaled: f64,
}

/// Log-log regression of `Ξ(a_t)e^t` against `1 + t` over `t ∈ [1, T]`,
/// with `c` raised until the bound holds at every sample of `[0, T]`.
pub fn xi_growth(t_end: f64, samples: usize) -> Result<XiGrowth> {
    if !(t_end > 1.0 && t_end <= 25.0) || samples < 4 {
        return Err(Error::Domain(format!("xi growth fit needs T in (1, 25], got {t_end}")));
    }
    let grid: Vec<f64> = (0..samples).map(|j| t_end * j as f64 / (samples - 1) as f64).collect();
    let mut min_scaled = f64::INFINITY;
    for &t in &grid {
        let v = xi_scaled(t);
        min_scaled = min_scaled.min(v);
        if v < 1.0 - 1e-8 {
            return Err(Error::LowerBoundViolation { t, value: v });
        }
    }
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .filter(|&&t| t >= 1.0)
        .map(|&t| ((1.0 + t).ln(), xi_scaled(t).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let d = sxy / sxx;
    let c = grid
        .iter()
        .map(|&t| xi_scaled(t) / (1.0 + t).powf(d))
        .fold(0.0, f64::max);
    Ok(XiGrowth { c, d, min_scaled })
}

/// Table of `φ_λ(a_t)` on an equispaced grid, interpolated with local
/// 8-point stencils. Used where the same `λ` is evaluated at very many
/// group points.
#[derive(Debug, Clone)]
pub struct PhiTable {
    lambda: Complex64,
    table: EquispacedTable<Complex64>,
}

impl PhiTable {
    /// Covers `t ∈ [0, t_max]`; the step shrinks with `|λ|` to keep the
    /// interpolation error near `1e-12`.
    pub fn new(lambda: SpectralParam, t_max: f64, k_nodes: usize) -> Self {
        let l = lambda.as_complex();
        let step = (0.12 / (l.norm() + 1.0)).min(0.02);
        // a few nodes below zero (by evenness) keep stencils centred near t = 0
        let start = -4.0 * step;
        let count = (t_max / step).ceil() as usize + 9;
        let table = EquispacedTable::sample(start, step, count, |t| phi_radial(l, t, k_nodes))
            .expect("table has at least 8 nodes");
        Self { lambda: l, table }
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn t_max(&self) -> f64 {
        self.table.end() - 4.0 * self.table.step()
    }

    /// Interpolated `φ_λ(a_t)`; `|t|` must not exceed [`PhiTable::t_max`].
    pub fn eval(&self, t: f64) -> Complex64 {
        self.table.eval(t.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn phi_at_identity_is_one() {
        for l in [SpectralParam::real(2.0), SpectralParam::new(0.3, -0.7)] {
            let v = phi(l, &GroupElement::identity(), &q());
            assert!((v - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn phi_at_minus_i_rho_is_one() {
        let v = phi(SpectralParam::MINUS_I_RHO, &GroupElement::diagonal(3.0), &q());
        assert!((v - 1.0).norm() < 1e-14);
    }

    #[test]
    fn phi_matches_legendre_series() {
        for (l, t) in [(2.0, 1.0), (0.5, 0.3), (5.0, 2.5), (1.0, 3.0)] {
            let v = phi_radial(Complex64::new(l, 0.0), t, 256);
            let r = reference::legendre_phi(Complex64::new(l, 0.0), t);
            assert!((v - r).norm() < 1e-12, "λ={l} t={t}: {v} vs {r}");
        }
        let l = Complex64::new(1.5, 0.6);
        let v = phi_radial(l, 1.7, 256);
        assert!((v - reference::legendre_phi(l, 1.7)).norm() < 1e-12);
    }

    #[test]
    fn phi_matches_iwasawa_definition() {
        let g = GroupElement::rotation(0.4) * GroupElement::diagonal(0.8) * GroupElement::unipotent(0.3);
        let l = SpectralParam::new(1.3, 0.4);
        let a = phi(l, &g, &q());
        let b = phi_iwasawa(l, &g, 512);
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn xi_matches_phi_zero_and_elliptic() {
        for t in [0.0, 0.5, 2.0, 6.0, 15.0] {
            let x = xi_radial(t);
            let p = phi_radial(Complex64::new(0.0, 0.0), t, 256);
            assert!((x - p.re).abs() < 1e-14 * (1.0 + t), "{t}");
            assert!((x - reference::xi_elliptic(t)).abs() < 1e-14, "{t}");
        }
        // asymptotic branch is continuous
        assert!((xi_scaled(300.0) / xi_scaled(300.0 + 1e-9) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn casimir_residual_examples() {
        let grid = [0.5, 1.0, 2.0, 4.0];
        assert!(radial_casimir_residual(SpectralParam::MINUS_I_RHO, &grid, &q()).unwrap() < 1e-10);
        assert!(radial_casimir_residual(SpectralParam::real(1.0), &grid, &q()).unwrap() < 1e-6);
        assert!(radial_casimir_residual(SpectralParam::new(2.0, 0.5), &grid, &q()).unwrap() < 1e-5);
        assert!(radial_casimir_residual(SpectralParam::ZERO, &[0.01], &q()).is_err());
    }

    #[test]
    fn c_fit_matches_closed_form() {
        for l in [1.0, 2.0, 4.0, 0.1, 20.0] {
            let c = c_function(SpectralParam::real(l), &q()).unwrap();
            let r = reference::c_function(Complex64::new(l, 0.0));
            assert!(
                (c.value - r).norm() < 1e-4 * r.norm().max(1.0),
                "{l}: {} vs {r}",
                c.value
            );
            assert!(c.fit_residual < C_FIT_ACCEPT);
        }
    }

    #[test]
    fn functional_equation_examples() {
        let e = GroupElement::identity();
        let a1 = GroupElement::diagonal(1.0);
        let a2 = GroupElement::diagonal(2.0);
        assert!(check_functional_equation(SpectralParam::real(1.0), &e, &a2, &q()) < 1e-14);
        assert!(check_functional_equation(SpectralParam::ZERO, &a1, &a2, &q()) < 1e-8);
        assert!(check_functional_equation(SpectralParam::MINUS_I_RHO, &a1, &a2, &q()) < 1e-10);
    }

    #[test]
    fn xi_growth_exponent_near_one() {
        let fit = xi_growth(20.0, 201).unwrap();
        assert!((fit.min_scaled - 1.0).abs() < 1e-15);
        assert!((0.9..=1.1).contains(&fit.d), "{}", fit.d);
    }

    #[test]
    fn phi_table_interpolates() {
        let l = SpectralParam::new(3.0, 0.2);
        let table = PhiTable::new(l, 8.0, 256);
        for t in [0.0, 0.013, 1.2345, -2.5, 7.99] {
            let exact = phi_radial(l.as_complex(), t, 256);
            assert!((table.eval(t) - exact).norm() < 1e-11, "{t}");
        }
    }
}
