//! K-bi-invariant functions on `G`, represented by their even radial
//! profile `t ↦ f(a_t)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::EquispacedTable;

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The shape family a profile was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `exp(-(t/width)²)`.
    Gaussian { width: f64 },
    /// `sech(t)^k`; decays like `e^{-k|t|}`.
    CauchyDecay { k: f64 },
    /// `exp(1 - 1/(1 - (t/radius)²))` on `|t| < radius`, zero outside.
    CompactBump { radius: f64 },
    /// Interpolated samples on `[0, end]`, zero beyond.
    Sampled { end: f64 },
    /// Anything else: sums, convolutions, closures.
    Custom { label: String },
}

/// How fast a profile decays, which fixes where its transform converges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Zero beyond the given radius.
    Compact(f64),
    /// Faster than every exponential.
    SuperExponential,
    /// `O(e^{-rate·t})`.
    Exponential(f64),
    /// No usable decay information.
    Unknown,
}

/// An even, real radial profile with a short description of its origin.
#[derive(Clone)]
pub struct RadialProfile {
    family: Family,
    decay: Decay,
    f: ProfileFn,
    /// Set for `α·f` and `f + g` so derivatives combine linearly.
    parts: Option<Arc<Combination>>,
}

#[derive(Debug)]
enum Combination {
    Scaled(f64, RadialProfile),
    Sum(RadialProfile, RadialProfile),
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("family", &self.family)
            .field("decay", &self.decay)
            .finish()
    }
}

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

impl RadialProfile {
    pub fn gaussian(width: f64) -> Result<Self> {
        positive("gaussian width", width)?;
        Ok(Self {
            family: Family::Gaussian { width },
            decay: Decay::SuperExponential,
            parts: None,
            f: Arc::new(move |t: f64| (-(t / width).powi(2)).exp()),
        })
    }

    pub fn cauchy_decay(k: f64) -> Result<Self> {
        positive("decay exponent", k)?;
        Ok(Self {
            family: Family::CauchyDecay { k },
            decay: Decay::Exponential(k),
            parts: None,
            f: Arc::new(move |t: f64| {
                let a = t.abs();
                // sech^k = (2e^{-a} / (1 + e^{-2a}))^k without overflow
                (k * (2f64.ln() - a - (-2.0 * a).exp().ln_1p())).exp()
            }),
        })
    }

    pub fn compact_bump(radius: f64) -> Result<Self> {
        positive("bump radius", radius)?;
        Ok(Self {
            family: Family::CompactBump { radius },
            decay: Decay::Compact(radius),
            parts: None,
            f: Arc::new(move |t: f64| bump(t / radius)),
        })
    }

    /// Samples at `t_j = j·step`, `j = 0..values.len()`; interpolated with
    /// 8-point stencils (mirrored through `t = 0`) and zero past the end.
    pub fn sampled(step: f64, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("profile samples must be finite".into()));
        }
        let n = values.len();
        if n < 8 {
            return Err(Error::Grid(format!("need at least 8 profile samples, got {n}")));
        }
        // prepend mirrored samples so stencils near 0 see an even function
        let mut mirrored: Vec<f64> = values[1..4].iter().rev().copied().collect();
        mirrored.extend_from_slice(&values);
        let table = EquispacedTable::new(-3.0 * step, step, mirrored)?;
        let end = step * (n - 1) as f64;
        Ok(Self {
            family: Family::Sampled { end },
            decay: Decay::Compact(end),
            parts: None,
            f: Arc::new(move |t: f64| {
                let a = t.abs();
                if a > end {
                    0.0
                } else {
                    table.eval(a)
                }
            }),
        })
    }

    /// Arbitrary closure; evaluated at `|t|`, so evenness holds by construction.
    pub fn custom(label: impl Into<String>, decay: Decay, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            family: Family::Custom { label: label.into() },
            decay,
            parts: None,
            f: Arc::new(move |t: f64| f(t.abs())),
        }
    }

    pub fn zero() -> Self {
        Self::custom("zero", Decay::Compact(0.0), |_| 0.0)
    }

    /// Parses `gaussian:1`, `cauchy_decay:4`, `compact_bump:2`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::Domain(format!("profile spec '{spec}' is not family:param")))?;
        let value: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("bad profile parameter '{arg}'")))?;
        match name.trim() {
            "gaussian" => Self::gaussian(value),
            "cauchy_decay" => Self::cauchy_decay(value),
            "compact_bump" => Self::compact_bump(value),
            other => Err(Error::Domain(format!("unknown profile family '{other}'"))),
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    pub fn label(&self) -> String {
        match &self.family {
            Family::Gaussian { width } => format!("gaussian:{width}"),
            Family::CauchyDecay { k } => format!("cauchy_decay:{k}"),
            Family::CompactBump { radius } => format!("compact_bump:{radius}"),
            Family::Sampled { end } => format!("sampled:{end}"),
            Family::Custom { label } => label.clone(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    /// Schwartz-class families: decay beats every `e^{-t}(1+t)^{-N}`.
    pub fn is_schwartz(&self) -> bool {
        matches!(self.decay, Decay::Compact(_) | Decay::SuperExponential)
    }

    /// Largest `|Im λ|` for which the transform integral converges
    /// (infinite for Schwartz-class decay).
    pub fn tube_margin(&self) -> f64 {
        match self.decay {
            Decay::Compact(_) | Decay::SuperExponential => f64::INFINITY,
            // integrand ~ e^{-kt} e^{(|Im λ| - 1)t} e^{2t}
            Decay::Exponential(k) => k - 1.0,
            Decay::Unknown => 0.0,
        }
    }

    /// Radius beyond which `|f(t)|·e^{growth·t}` is below `eps` times its
    /// maximum. Capped at `cap`.
    pub fn effective_radius(&self, growth: f64, eps: f64, cap: f64) -> f64 {
        if let Decay::Compact(r) = self.decay {
            return r.min(cap);
        }
        if matches!(self.decay, Decay::Unknown) {
            return cap;
        }
        const STEP: f64 = 0.05;
        let weighted = |t: f64| self.eval(t).abs() * (growth * t).exp();
        let mut peak: f64 = 0.0;
        let mut t = 0.0;
        let mut last_significant: f64 = 0.0;
        while t <= cap {
            let v = weighted(t);
            peak = peak.max(v);
            if v > eps * peak {
                last_significant = t;
            }
            t += STEP;
        }
        (last_significant + 2.0 * STEP).min(cap)
    }

    /// `α·f`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let f = self.f.clone();
        Self {
            family: Family::Custom {
                label: format!("{alpha}*{}", self.label()),
            },
            decay: self.decay,
            f: Arc::new(move |t| alpha * f(t)),
            parts: Some(Arc::new(Combination::Scaled(alpha, self.clone()))),
        }
    }

    /// `f + g`.
    pub fn plus(&self, other: &RadialProfile) -> Self {
        let (f, g) = (self.f.clone(), other.f.clone());
        Self {
            family: Family::Custom {
                label: format!("{}+{}", self.label(), other.label()),
            },
            decay: weaker(self.decay, other.decay),
            f: Arc::new(move |t| f(t) + g(t)),
            parts: Some(Arc::new(Combination::Sum(self.clone(), other.clone()))),
        }
    }

    /// Radii where the profile or one of its summands stops being smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match (&self.family, self.parts.as_deref()) {
            (_, Some(Combination::Scaled(_, f))) => f.breakpoints(),
            (_, Some(Combination::Sum(f, g))) => [f.breakpoints(), g.breakpoints()].concat(),
            (Family::CompactBump { radius }, None) => vec![*radius],
            (Family::Sampled { end }, None) => vec![*end],
            _ => Vec::new(),
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// `n`-th derivative in `t` by central differences (`n ≤ 4`) with one
    /// Richardson level.
    pub fn derivative(&self, n: usize, t: f64, h: f64) -> f64 {
        match self.parts.as_deref() {
            Some(Combination::Scaled(alpha, f)) => alpha * f.derivative(n, t, h),
            Some(Combination::Sum(f, g)) => f.derivative(n, t, h) + g.derivative(n, t, h),
            None => central_difference(&|x: f64| self.eval(x), n, t, h),
        }
    }
}

/// `n`-th central difference (`n ≤ 4`), Richardson-extrapolated from steps
/// `h` and `h/2`.
pub fn central_difference(f: &impl Fn(f64) -> f64, n: usize, t: f64, h: f64) -> f64 {
    let raw = |h: f64| -> f64 {
        match n {
            0 => f(t),
            1 => (f(t + h) - f(t - h)) / (2.0 * h),
            2 => (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h),
            3 => (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h)) / (2.0 * h.powi(3)),
            4 => (f(t + 2.0 * h) - 4.0 * f(t + h) + 6.0 * f(t) - 4.0 * f(t - h) + f(t - 2.0 * h)) / h.powi(4),
            _ => panic!("derivative order {n} above 4"),
        }
    };
    if n == 0 {
        return f(t);
    }
    (4.0 * raw(0.5 * h) - raw(h)) / 3.0
}

fn weaker(a: Decay, b: Decay) -> Decay {
    use Decay::*;
    match (a, b) {
        (Unknown, _) | (_, Unknown) => Unknown,
        (Exponential(x), Exponential(y)) => Exponential(x.min(y)),
        (Exponential(x), _) | (_, Exponential(x)) => Exponential(x),
        (SuperExponential, _) | (_, SuperExponential) => SuperExponential,
        (Compact(x), Compact(y)) => Compact(x.max(y)),
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be positive and finite, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_even_and_normalized() {
        for p in [
            RadialProfile::gaussian(1.3).unwrap(),
            RadialProfile::cauchy_decay(3.0).unwrap(),
            RadialProfile::compact_bump(2.0).unwrap(),
        ] {
            assert!((p.eval(0.0) - 1.0).abs() < 1e-15, "{}", p.label());
            for t in [0.1, 0.7, 1.9, 5.0] {
                assert_eq!(p.eval(t), p.eval(-t));
            }
        }
    }

    #[test]
    fn cauchy_decay_is_sech_power() {
        let p = RadialProfile::cauchy_decay(2.5).unwrap();
        for t in [0.0, 0.3, 2.0, 10.0] {
            let exact = (1.0 / f64::cosh(t)).powf(2.5);
            assert!((p.eval(t) - exact).abs() < 1e-14 * exact.max(1e-300), "{t}");
        }
        assert!(p.eval(800.0).is_finite());
        assert_eq!(p.tube_margin(), 1.5);
    }

    #[test]
    fn bump_vanishes_outside_support() {
        let p = RadialProfile::compact_bump(2.0).unwrap();
        assert_eq!(p.eval(2.0), 0.0);
        assert_eq!(p.eval(3.0), 0.0);
        assert!(p.eval(1.99) > 0.0);
        assert_eq!(p.effective_radius(2.0, 1e-17, 30.0), 2.0);
    }

    #[test]
    fn sampled_profile_interpolates() {
        let g = RadialProfile::gaussian(1.0).unwrap();
        let step = 0.02;
        let values = (0..=300).map(|j| g.eval(j as f64 * step)).collect();
        let s = RadialProfile::sampled(step, values).unwrap();
        for t in [0.0, 0.011, 1.234, -2.5, 5.99] {
            assert!((s.eval(t) - g.eval(t)).abs() < 1e-11, "{t}");
        }
        assert_eq!(s.eval(6.5), 0.0);
    }

    #[test]
    fn parse_round_trip() {
        let p = RadialProfile::parse("gaussian:0.5").unwrap();
        assert_eq!(p.family(), &Family::Gaussian { width: 0.5 });
        assert_eq!(p.label(), "gaussian:0.5");
        assert!(RadialProfile::parse("gaussian").is_err());
        assert!(RadialProfile::parse("wave:1").is_err());
        assert!(RadialProfile::parse("gaussian:-1").is_err());
    }

    #[test]
    fn derivatives_of_gaussian() {
        let p = RadialProfile::gaussian(1.0).unwrap();
        let t: f64 = 0.7;
        let e = (-t * t).exp();
        assert!((p.derivative(1, t, 1e-3) - (-2.0 * t * e)).abs() < 1e-9);
        assert!((p.derivative(2, t, 1e-3) - (4.0 * t * t - 2.0) * e).abs() < 1e-7);
    }

    #[test]
    fn effective_radius_of_gaussian() {
        let p = RadialProfile::gaussian(1.0).unwrap();
        let r = p.effective_radius(2.0, 1e-17, 30.0);
        // e^{-t² + 2t} falls 1e-17 below its peak e near t ≈ 7.3
        assert!((7.0..8.0).contains(&r), "{r}");
    }
}
