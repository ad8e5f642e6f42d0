//! Matrix model of `G = SL(2,ℝ)`: Iwasawa and polar (Cartan)
//! decompositions, the radial gauge `σ`, the exponential map and Haar
//! integration in polar coordinates.
//!
//! Conventions: `K = SO(2)` with `k(θ)` the rotation by `θ`,
//! `a_t = diag(e^t, e^{-t}) = exp(t·H₁)` with `H₁ = diag(1, -1)`, and
//! `n(u)` the upper unitriangular matrix. The Haar measure in polar
//! coordinates is `sinh(2t) dt dk₁ dk₂` with `vol(K) = 1`.

use std::f64::consts::PI;
use std::ops::Mul;

use crate::error::{Error, Result, Warning};
use crate::quadrature::{circle_mean, composite_gauss, graded_gauss, Integral, QuadratureSpec, Scalar, RADIAL_ORDER};

/// Tolerance on `|det - 1|` accepted by [`GroupElement::new`].
pub const DET_TOLERANCE: f64 = 1e-10;

/// Below this radial coordinate an element is treated as lying in `K`.
const POLAR_DEGENERATE: f64 = 1e-12;

/// A 2×2 real matrix of determinant one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

/// `g = k(theta) · a_t · n(u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IwasawaCoords {
    pub theta: f64,
    pub t: f64,
    pub u: f64,
}

/// `g = k(theta1) · a_t · k(theta2)` with `t ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarCoords {
    pub theta1: f64,
    pub t: f64,
    pub theta2: f64,
}

/// `X = h·H₁ + e_plus·E + e_minus·F` in `sl(2,ℝ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentDirection {
    pub h: f64,
    pub e_plus: f64,
    pub e_minus: f64,
}

impl GroupElement {
    /// Checked constructor; rejects matrices with `|det - 1| > 1e-10`.
    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Result<Self> {
        if ![m11, m12, m21, m22].iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        let g = Self { m11, m12, m21, m22 };
        let det = g.det();
        if (det - 1.0).abs() > DET_TOLERANCE {
            return Err(Error::Unimodularity { det });
        }
        Ok(g)
    }

    pub(crate) const fn from_entries(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub const fn identity() -> Self {
        Self::from_entries(1.0, 0.0, 0.0, 1.0)
    }

    /// Rotation `k(θ)`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_entries(c, -s, s, c)
    }

    /// `a_t = exp(t·H₁)`.
    pub fn diagonal(t: f64) -> Self {
        Self::from_entries(t.exp(), 0.0, 0.0, (-t).exp())
    }

    /// `n(u)`.
    pub fn unipotent(u: f64) -> Self {
        Self::from_entries(1.0, u, 0.0, 1.0)
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn inverse(&self) -> Self {
        Self::from_entries(self.m22, -self.m12, -self.m21, self.m11)
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Orthogonal-triangular factorization with positive diagonal.
    pub fn iwasawa(&self) -> IwasawaCoords {
        let r = self.m11.hypot(self.m21);
        let theta = self.m21.atan2(self.m11);
        let (s, c) = theta.sin_cos();
        let top_right = c * self.m12 + s * self.m22;
        IwasawaCoords {
            theta,
            t: r.ln(),
            u: top_right / r,
        }
    }

    /// `H(g)` as a multiple of `H₁`; cheaper than the full decomposition.
    pub fn iwasawa_height(&self) -> f64 {
        self.m11.hypot(self.m21).ln()
    }

    /// Closed-form 2×2 singular value factorization with both rotation
    /// factors in `SO(2)`. The `(k₁m, m⁻¹k₂)` ambiguity (`m = ±1`) is fixed
    /// by `theta1 ∈ [0, π)`; on `K` itself `theta2 = 0`.
    pub fn polar(&self) -> PolarCoords {
        let e = 0.5 * (self.m11 + self.m22);
        let f = 0.5 * (self.m11 - self.m22);
        let g = 0.5 * (self.m21 + self.m12);
        let h = 0.5 * (self.m21 - self.m12);
        let r = f.hypot(g);
        let t = r.asinh();
        if t < POLAR_DEGENERATE {
            return PolarCoords {
                theta1: h.atan2(e).rem_euclid(2.0 * PI),
                t: 0.0,
                theta2: 0.0,
            };
        }
        let a1 = g.atan2(f);
        let a2 = h.atan2(e);
        let mut theta1 = 0.5 * (a2 + a1);
        let mut theta2 = 0.5 * (a2 - a1);
        while theta1 < 0.0 {
            theta1 += PI;
            theta2 += PI;
        }
        while theta1 >= PI {
            theta1 -= PI;
            theta2 -= PI;
        }
        PolarCoords {
            theta1,
            t,
            theta2: theta2.rem_euclid(2.0 * PI),
        }
    }

    /// Radial gauge `σ(g) = |t|` of the polar decomposition.
    pub fn sigma(&self) -> f64 {
        let f = 0.5 * (self.m11 - self.m22);
        let g = 0.5 * (self.m21 + self.m12);
        f.hypot(g).asinh()
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, o: GroupElement) -> GroupElement {
        GroupElement::from_entries(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }
}

impl Mul<&GroupElement> for &GroupElement {
    type Output = GroupElement;

    fn mul(self, o: &GroupElement) -> GroupElement {
        *self * *o
    }
}

impl IwasawaCoords {
    pub fn recompose(&self) -> GroupElement {
        GroupElement::rotation(self.theta) * GroupElement::diagonal(self.t) * GroupElement::unipotent(self.u)
    }
}

impl PolarCoords {
    pub fn recompose(&self) -> GroupElement {
        GroupElement::rotation(self.theta1) * GroupElement::diagonal(self.t) * GroupElement::rotation(self.theta2)
    }
}

impl TangentDirection {
    pub const H1: TangentDirection = TangentDirection {
        h: 1.0,
        e_plus: 0.0,
        e_minus: 0.0,
    };

    pub fn new(h: f64, e_plus: f64, e_minus: f64) -> Self {
        Self { h, e_plus, e_minus }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            h: s * self.h,
            e_plus: s * self.e_plus,
            e_minus: s * self.e_minus,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.h * self.h + self.e_plus * self.e_plus + self.e_minus * self.e_minus).sqrt()
    }

    /// Matrix exponential; `X² = δ·I` with `δ = h² + e₊e₋`.
    pub fn exp(&self) -> GroupElement {
        let delta = self.h * self.h + self.e_plus * self.e_minus;
        let (c, s) = if delta > 1e-16 {
            let r = delta.sqrt();
            (r.cosh(), r.sinh() / r)
        } else if delta < -1e-16 {
            let r = (-delta).sqrt();
            (r.cos(), r.sin() / r)
        } else {
            // series: cosh√δ ≈ 1 + δ/2, sinh√δ/√δ ≈ 1 + δ/6
            (1.0 + 0.5 * delta, 1.0 + delta / 6.0)
        };
        GroupElement::from_entries(c + s * self.h, s * self.e_plus, s * self.e_minus, c - s * self.h)
    }
}

/// `∫_G F(x) dx` over the truncated polar grid
/// `K × [0, t_max] × K`, equispaced in both angles and composite
/// Gauss-Legendre in `t`.
pub fn haar_integrate<T: Scalar>(f: impl Fn(&GroupElement) -> T, q: &QuadratureSpec) -> Integral<T> {
    let n = q.k_nodes;
    let shell = |t: f64| -> T {
        let a = GroupElement::diagonal(t);
        let inner = circle_mean(
            |th1| {
                let left = GroupElement::rotation(th1) * a;
                circle_mean(|th2| f(&(left * GroupElement::rotation(th2))), n)
            },
            n,
        );
        inner * (2.0 * t).sinh()
    };
    let (value, peak) = composite_gauss(shell, 0.0, q.t_max, q.t_panels, RADIAL_ORDER);
    let (coarse, _) = composite_gauss(shell, 0.0, q.t_max, (q.t_panels / 2).max(1), RADIAL_ORDER);
    let mut warnings = Vec::new();
    let end = shell(q.t_max).modulus();
    if end > q.tol && end > 1e-12 * peak {
        warnings.push(Warning::Truncation {
            at: q.t_max,
            magnitude: end,
        });
    }
    Integral {
        value,
        error: (value - coarse).modulus(),
        warnings,
    }
}

/// Haar integral of a K-bi-invariant function given by its radial profile.
pub fn haar_integrate_radial<T: Scalar>(f: impl Fn(f64) -> T, q: &QuadratureSpec) -> Integral<T> {
    let shell = |t: f64| f(t) * (2.0 * t).sinh();
    let (value, peak) = composite_gauss(shell, 0.0, q.t_max, q.t_panels, RADIAL_ORDER);
    let (coarse, _) = composite_gauss(shell, 0.0, q.t_max, (q.t_panels / 2).max(1), RADIAL_ORDER);
    let mut warnings = Vec::new();
    let end = shell(q.t_max).modulus();
    if end > q.tol && end > 1e-12 * peak {
        warnings.push(Warning::Truncation {
            at: q.t_max,
            magnitude: end,
        });
    }
    Integral {
        value,
        error: (value - coarse).modulus(),
        warnings,
    }
}

/// Panels used on the mapped tail `t = t_max / s`, `s ∈ (0, 1]`.
const TAIL_PANELS: usize = 6;

/// `∫_0^∞ w(t) dt` for a density-weighted radial integrand `w` that decays
/// at least like `t^{-2}`: composite Gauss on `[0, t_max]` plus the tail
/// mapped onto `(0, 1]` by `t = t_max / s`. The caller supplies `w`
/// including the Haar density and must keep it finite for large `t`.
pub fn radial_integrate_complete<T: Scalar>(w: impl Fn(f64) -> T, q: &QuadratureSpec) -> T {
    let (body, _) = composite_gauss(&w, 0.0, q.t_max, q.t_panels, RADIAL_ORDER);
    body + radial_tail(w, q)
}

/// [`radial_integrate_complete`] for an integrand with a kink at `at`.
pub fn radial_integrate_complete_at<T: Scalar>(w: impl Fn(f64) -> T, at: f64, q: &QuadratureSpec) -> T {
    let body = graded_gauss(&w, 0.0, q.t_max, at, q.panel_width(), RADIAL_ORDER);
    body + radial_tail(w, q)
}

fn radial_tail<T: Scalar>(w: impl Fn(f64) -> T, q: &QuadratureSpec) -> T {
    let t_max = q.t_max;
    let mapped = |s: f64| w(t_max / s) * (t_max / (s * s));
    composite_gauss(mapped, 0.0, 1.0, TAIL_PANELS, RADIAL_ORDER).0
}

/// Uniform random-ish element with `σ ≤ max_sigma` from three unit draws.
pub fn element_from_unit(u1: f64, u2: f64, u3: f64, max_sigma: f64) -> GroupElement {
    PolarCoords {
        theta1: 2.0 * PI * u1,
        t: max_sigma * u2,
        theta2: 2.0 * PI * u3,
    }
    .recompose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_element_examples() {
        let e = GroupElement::new(1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(e, GroupElement::identity());
        let a1 = GroupElement::new(1f64.exp(), 0.0, 0.0, (-1f64).exp()).unwrap();
        assert!(a1.max_abs_diff(&GroupElement::diagonal(1.0)) < 1e-15);
        assert!(matches!(
            GroupElement::new(1.0, 0.0, 0.0, 2.0),
            Err(Error::Unimodularity { .. })
        ));
        assert!(GroupElement::new(f64::NAN, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn iwasawa_of_identity_and_diagonal() {
        let c = GroupElement::identity().iwasawa();
        assert_eq!((c.theta, c.t, c.u), (0.0, 0.0, 0.0));
        let c = GroupElement::diagonal(0.7).iwasawa();
        assert!(c.theta.abs() < 1e-15 && (c.t - 0.7).abs() < 1e-15 && c.u.abs() < 1e-15);
    }

    #[test]
    fn polar_of_identity_and_diagonal() {
        let p = GroupElement::identity().polar();
        assert_eq!((p.theta1, p.t, p.theta2), (0.0, 0.0, 0.0));
        let p = GroupElement::diagonal(2.0).polar();
        assert!(p.theta1.abs() < 1e-15 && (p.t - 2.0).abs() < 1e-14 && p.theta2.abs() < 1e-15);
    }

    #[test]
    fn polar_recomposes_rotation() {
        let k = GroupElement::rotation(4.0);
        let p = k.polar();
        assert_eq!(p.t, 0.0);
        assert_eq!(p.theta2, 0.0);
        assert!(p.recompose().max_abs_diff(&k) < 1e-14);
    }

    #[test]
    fn sigma_of_diagonal_is_abs_t() {
        for t in [-3.0, -0.5, 0.0, 1e-9, 2.5, 20.0] {
            let s = GroupElement::diagonal(t).sigma();
            assert!((s - f64::abs(t)).abs() < 1e-14 * (1.0 + f64::abs(t)), "{t}: {s}");
        }
    }

    #[test]
    fn exp_of_h1_is_diagonal() {
        let g = TangentDirection::H1.scaled(0.3).exp();
        assert!(g.max_abs_diff(&GroupElement::diagonal(0.3)) < 1e-15);
        let k = TangentDirection::new(0.0, -0.4, 0.4).exp();
        assert!(k.max_abs_diff(&GroupElement::rotation(0.4)) < 1e-15);
        let n = TangentDirection::new(0.0, 0.5, 0.0).exp();
        assert!(n.max_abs_diff(&GroupElement::unipotent(0.5)) < 1e-15);
    }

    #[test]
    fn haar_of_zero_is_zero() {
        let q = QuadratureSpec {
            k_nodes: 8,
            t_max: 5.0,
            t_panels: 10,
            ..Default::default()
        };
        assert_eq!(haar_integrate(|_| 0.0, &q).value, 0.0);
    }

    #[test]
    fn haar_of_bi_invariant_matches_radial() {
        let q = QuadratureSpec {
            k_nodes: 16,
            t_max: 10.0,
            t_panels: 20,
            ..Default::default()
        };
        let full = haar_integrate(|g| (-g.sigma().powi(2)).exp(), &q);
        let radial = haar_integrate_radial(|t: f64| (-t * t).exp(), &q);
        assert!((full.value - radial.value).abs() < 1e-12);
    }
}
