//! Wave packets `φ_a(x) = ∫ a(-λ, x)φ_{-λ}(x)·½|c(λ)|⁻² dλ`, the
//! Plancherel density from fitted c-function values, calibration of the
//! global inversion constant, and transform inversion.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{haar_integrate_radial, GroupElement};
use crate::profile::RadialProfile;
use crate::quadrature::{line_integrate, EquispacedTable, Integral, QuadratureSpec};
use crate::spherical::{c_fit, phi_radial, SpectralParam};
use crate::transform::{hc_value, SpectralSamples, SPECTRAL_NEGLIGIBLE};

/// Below this `|λ|` the density is extrapolated rather than fitted.
pub const DENSITY_FIT_FLOOR: f64 = 0.1;

type DensityKey = (u64, usize);

fn density_cache() -> &'static Mutex<HashMap<DensityKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<DensityKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(Mutex::default)
}

fn fitted_density(lambda: f64, q: &QuadratureSpec) -> Result<f64> {
    let key = (lambda.to_bits(), q.k_nodes);
    if let Some(v) = density_cache().lock().expect("density cache").get(&key) {
        return Ok(*v);
    }
    let v = 0.5 / c_fit(lambda, q)?.plus.norm_sqr();
    density_cache().lock().expect("density cache").insert(key, v);
    Ok(v)
}

/// `|𝔴|⁻¹(c(λ)c(-λ))⁻¹ = ½|c(λ)|⁻²` for real `λ`, from fitted c-function
/// values. For `|λ| < 0.1` the density is `λ²·p(λ²)` with `p` the
/// quadratic through the fitted `density/λ²` at `0.1, 0.2, 0.3`, so it
/// vanishes at the origin.
pub fn plancherel_density(lambda: f64, q: &QuadratureSpec) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("density at non-finite λ = {lambda}")));
    }
    if lambda.abs() >= DENSITY_FIT_FLOOR {
        return fitted_density(lambda, q);
    }
    let xs = [0.01, 0.04, 0.09];
    let ys = [
        fitted_density(0.1, q)? / xs[0],
        fitted_density(0.2, q)? / xs[1],
        fitted_density(0.3, q)? / xs[2],
    ];
    let x = lambda * lambda;
    let mut v = 0.0;
    for i in 0..3 {
        let mut w = ys[i];
        for j in 0..3 {
            if i != j {
                w *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        v += w;
    }
    Ok((v * x).max(0.0))
}

type SpectralFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
type LocalSpectralFn = Arc<dyn Fn(f64, &GroupElement) -> Complex64 + Send + Sync>;

/// Spectral symbol `a(λ, x)` on the real line.
#[derive(Clone)]
pub enum SymbolKind {
    XIndependent(SpectralFn),
    XDependent(LocalSpectralFn),
}

#[derive(Clone)]
pub struct WavePacketSymbol {
    kind: SymbolKind,
    weyl_invariant: bool,
    label: String,
}

impl fmt::Debug for WavePacketSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            SymbolKind::XIndependent(_) => "x_independent",
            SymbolKind::XDependent(_) => "x_dependent",
        };
        f.debug_struct("WavePacketSymbol")
            .field("kind", &kind)
            .field("weyl_invariant", &self.weyl_invariant)
            .field("label", &self.label)
            .finish()
    }
}

/// Spectral nodes and group points on which symbol invariants are checked.
const CHECK_LAMBDAS: [f64; 6] = [0.0, 0.3, 1.1, 2.7, 5.3, 9.9];
const SYMBOL_TOLERANCE: f64 = 1e-8;

fn check_points() -> [GroupElement; 3] {
    [
        GroupElement::identity(),
        GroupElement::diagonal(0.5),
        GroupElement::diagonal(1.5),
    ]
}

impl WavePacketSymbol {
    /// Builds a symbol; a claimed Weyl invariance, and sphericity of an
    /// `x`-dependent symbol, are checked on fixed nodes to `1e-8`.
    pub fn new(label: impl Into<String>, kind: SymbolKind, weyl_invariant: bool) -> Result<Self> {
        let s = Self {
            kind,
            weyl_invariant,
            label: label.into(),
        };
        if weyl_invariant {
            for x in check_points() {
                let d = s.weyl_defect(&CHECK_LAMBDAS, &x);
                if d > SYMBOL_TOLERANCE {
                    return Err(Error::Domain(format!(
                        "{} is not Weyl invariant: defect {d:.3e}",
                        s.label
                    )));
                }
            }
        }
        if matches!(s.kind, SymbolKind::XDependent(_)) {
            for x in check_points() {
                let d = s.spherical_defect(&CHECK_LAMBDAS, &x);
                if d > SYMBOL_TOLERANCE {
                    return Err(Error::Domain(format!(
                        "{} is not spherical in x: defect {d:.3e}",
                        s.label
                    )));
                }
            }
        }
        Ok(s)
    }

    pub fn x_independent(
        label: impl Into<String>,
        a: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        weyl_invariant: bool,
    ) -> Result<Self> {
        Self::new(label, SymbolKind::XIndependent(Arc::new(a)), weyl_invariant)
    }

    pub fn x_dependent(
        label: impl Into<String>,
        a: impl Fn(f64, &GroupElement) -> Complex64 + Send + Sync + 'static,
        weyl_invariant: bool,
    ) -> Result<Self> {
        Self::new(label, SymbolKind::XDependent(Arc::new(a)), weyl_invariant)
    }

    pub fn zero() -> Self {
        Self {
            kind: SymbolKind::XIndependent(Arc::new(|_| Complex64::new(0.0, 0.0))),
            weyl_invariant: true,
            label: "zero".into(),
        }
    }

    /// `λ ↦ f̂(λ)`, computed on demand and memoized per node.
    pub fn from_transform(f: &RadialProfile, q: &QuadratureSpec) -> Self {
        let f = f.clone();
        let q = *q;
        let memo: Mutex<HashMap<u64, Complex64>> = Mutex::default();
        Self {
            label: format!("transform of {}", f.label()),
            kind: SymbolKind::XIndependent(Arc::new(move |l| {
                if let Some(v) = memo.lock().expect("symbol memo").get(&l.to_bits()) {
                    return *v;
                }
                let v = hc_value(&f, SpectralParam::real(l), &q).unwrap_or(Complex64::new(0.0, 0.0));
                memo.lock().expect("symbol memo").insert(l.to_bits(), v);
                v
            })),
            weyl_invariant: true,
        }
    }

    /// Interpolates the real-line row of `samples` (uniform real axis with
    /// at least 8 nodes). A grid on `[0, L]` is extended by `a(-λ) = a(λ)`;
    /// outside the grid the symbol is zero.
    pub fn from_samples(samples: &SpectralSamples) -> Result<Self> {
        let row = samples
            .im_axis()
            .iter()
            .position(|&y| y == 0.0)
            .ok_or_else(|| Error::Grid("samples have no real-line row".into()))?;
        let re = samples.re_axis();
        if re.len() < 8 {
            return Err(Error::Grid(format!("need at least 8 real nodes, got {}", re.len())));
        }
        let step = (re[re.len() - 1] - re[0]) / (re.len() - 1) as f64;
        if re
            .windows(2)
            .any(|w| ((w[1] - w[0]) - step).abs() > 1e-9 * step.max(1.0))
        {
            return Err(Error::Grid("real axis must be uniform".into()));
        }
        let values: Vec<Complex64> = (0..re.len()).map(|i| samples.at(i, row)).collect();
        let table = EquispacedTable::new(re[0], step, values)?;
        let mirrored = re[0] >= 0.0;
        let (lo, hi) = (re[0], re[re.len() - 1]);
        let a = move |l: f64| {
            let l = if mirrored { l.abs() } else { l };
            if l < lo - 1e-12 || l > hi + 1e-12 {
                Complex64::new(0.0, 0.0)
            } else {
                table.eval(l.clamp(lo, hi))
            }
        };
        Self::x_independent(format!("samples of {}", samples.source()), a, mirrored)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn is_weyl_invariant(&self) -> bool {
        self.weyl_invariant
    }

    pub fn eval(&self, lambda: f64, x: &GroupElement) -> Complex64 {
        match &self.kind {
            SymbolKind::XIndependent(a) => a(lambda),
            SymbolKind::XDependent(a) => a(lambda, x),
        }
    }

    /// `max |a(λ, x) - a(-λ, x)|` over `nodes`.
    pub fn weyl_defect(&self, nodes: &[f64], x: &GroupElement) -> f64 {
        nodes
            .iter()
            .map(|&l| (self.eval(l, x) - self.eval(-l, x)).norm())
            .fold(0.0, f64::max)
    }

    /// `max |a(λ, k₁xk₂) - a(λ, x)|` over `nodes` and a few rotations.
    pub fn spherical_defect(&self, nodes: &[f64], x: &GroupElement) -> f64 {
        let angles = [(0.4, -1.3), (2.1, 0.7), (-2.9, 3.0)];
        let mut worst: f64 = 0.0;
        for &l in nodes {
            let base = self.eval(l, x);
            for (a, b) in angles {
                let y = GroupElement::rotation(a) * *x * GroupElement::rotation(b);
                worst = worst.max((self.eval(l, &y) - base).norm());
            }
        }
        worst
    }
}

/// Global normalization of the synthesis integral, fixed once from a
/// reference profile.
#[derive(Debug, Clone)]
pub struct PlancherelCalibration {
    pub constant: f64,
    pub reference_profile: RadialProfile,
    pub residual: f64,
}

impl PlancherelCalibration {
    /// A calibration with a known constant and no reference.
    pub fn fixed(constant: f64) -> Self {
        Self {
            constant,
            reference_profile: RadialProfile::zero(),
            residual: 0.0,
        }
    }
}

/// Calibration residuals above this are rejected.
pub const CALIBRATION_REJECT: f64 = 1e-3;
const CALIBRATION_POINTS: [f64; 4] = [0.5, 1.0, 2.0, 3.0];

/// Step of the scan locating the end of the symbol's support.
const SPECTRAL_SCAN_STEP: f64 = 0.5;

/// Smallest `L ≤ λ_max` beyond which `|a(±λ, x)|(1+λ)` stays below
/// `1e-13` of its peak (three consecutive scan nodes), padded by one unit.
pub fn spectral_radius(a: &WavePacketSymbol, x: &GroupElement, q: &QuadratureSpec) -> f64 {
    let mut peak: f64 = 0.0;
    let mut quiet = 0;
    let mut l = 0.0;
    while l < q.lambda_max {
        let mut m = a.eval(l, x).norm();
        if !a.weyl_invariant {
            m = m.max(a.eval(-l, x).norm());
        }
        m *= 1.0 + l;
        peak = peak.max(m);
        if m <= SPECTRAL_NEGLIGIBLE * peak {
            quiet += 1;
            if quiet >= 3 {
                return (l + 1.0).min(q.lambda_max);
            }
        } else {
            quiet = 0;
        }
        l += SPECTRAL_SCAN_STEP;
    }
    q.lambda_max
}

/// `∫ a(-λ, x)φ_{-λ}(x)·density(λ) dλ` without the constant, over
/// `|λ| ≤ spectral_radius` at the node density of `q`.
fn synthesize_raw(
    a: &WavePacketSymbol,
    x: &GroupElement,
    reflected: bool,
    q: &QuadratureSpec,
) -> Result<Integral<Complex64>> {
    let t = x.sigma();
    let k = q.k_nodes;
    let end = spectral_radius(a, x, q);
    let nodes = ((q.lambda_nodes as f64 * end / q.lambda_max / 16.0).ceil() as usize * 16).max(32);
    let failure = RefCell::new(None);
    let integrand = |l: f64| -> Complex64 {
        // λ → -λ maps the integrand to a(λ)φ_λ(x)·density(-λ)
        let (m, d) = if reflected { (l, -l) } else { (-l, l) };
        let v = a.eval(m, x);
        if v == Complex64::new(0.0, 0.0) {
            return v;
        }
        match plancherel_density(d, q) {
            Ok(w) => v * phi_radial(Complex64::new(m, 0.0), t, k) * w,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let r = line_integrate(integrand, end, nodes, a.weyl_invariant);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// `φ_a(x)`, scaled by the calibrated constant.
pub fn synthesize(
    a: &WavePacketSymbol,
    x: &GroupElement,
    cal: &PlancherelCalibration,
    q: &QuadratureSpec,
) -> Result<Integral<Complex64>> {
    let mut r = synthesize_raw(a, x, false, q)?;
    r.value *= cal.constant;
    r.error *= cal.constant;
    Ok(r)
}

/// [`synthesize`] after the substitution `λ → -λ` in the integrand.
pub fn synthesize_reflected(
    a: &WavePacketSymbol,
    x: &GroupElement,
    cal: &PlancherelCalibration,
    q: &QuadratureSpec,
) -> Result<Integral<Complex64>> {
    let mut r = synthesize_raw(a, x, true, q)?;
    r.value *= cal.constant;
    r.error *= cal.constant;
    Ok(r)
}

/// Fixes the constant so that synthesizing `f̂` returns `f(0)` at `e`,
/// then measures the round trip at `t ∈ {0.5, 1, 2, 3}`.
pub fn calibrate(reference: &RadialProfile, q: &QuadratureSpec) -> Result<PlancherelCalibration> {
    if !reference.is_schwartz() {
        return Err(Error::Domain(format!(
            "calibration needs a Schwartz reference, got {}",
            reference.label()
        )));
    }
    let symbol = WavePacketSymbol::from_transform(reference, q);
    let raw = synthesize_raw(&symbol, &GroupElement::identity(), false, q)?.value.re;
    let constant = reference.eval(0.0) / raw;
    if !(constant.is_finite() && constant > 0.0) {
        return Err(Error::Calibration {
            residual: f64::INFINITY,
            tolerance: CALIBRATION_REJECT,
        });
    }
    let mut residual: f64 = 0.0;
    for t in CALIBRATION_POINTS {
        let v = synthesize_raw(&symbol, &GroupElement::diagonal(t), false, q)?.value;
        residual = residual.max((v * constant - reference.eval(t)).norm());
    }
    if residual > CALIBRATION_REJECT {
        return Err(Error::Calibration {
            residual,
            tolerance: CALIBRATION_REJECT,
        });
    }
    Ok(PlancherelCalibration {
        constant,
        reference_profile: reference.clone(),
        residual,
    })
}

/// Real-line grid `[0, λ_max]` used to tabulate transforms for inversion.
pub fn inversion_grid(q: &QuadratureSpec) -> Vec<f64> {
    let n = q.lambda_nodes;
    (0..=n).map(|j| q.lambda_max * j as f64 / n as f64).collect()
}

/// `t ↦ Re φ_{f̂}(a_t)` on `t_grid`, with the symbol interpolated from
/// `samples`.
pub fn invert_values(
    samples: &SpectralSamples,
    t_grid: &[f64],
    cal: &PlancherelCalibration,
    q: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let symbol = WavePacketSymbol::from_samples(samples)?;
    t_grid
        .iter()
        .map(|&t| Ok(synthesize(&symbol, &GroupElement::diagonal(t), cal, q)?.value.re))
        .collect()
}

/// Inverse transform sampled on a uniform grid `t_grid` starting at 0
/// (at least 8 nodes); zero beyond the last node.
pub fn invert(
    samples: &SpectralSamples,
    t_grid: &[f64],
    cal: &PlancherelCalibration,
    q: &QuadratureSpec,
) -> Result<RadialProfile> {
    if t_grid.len() < 8 || t_grid[0] != 0.0 {
        return Err(Error::Grid(
            "inversion grid must start at 0 and have at least 8 nodes".into(),
        ));
    }
    let step = t_grid[1] - t_grid[0];
    if t_grid
        .windows(2)
        .any(|w| ((w[1] - w[0]) - step).abs() > 1e-9 * step.max(1.0))
    {
        return Err(Error::Grid("inversion grid must be uniform".into()));
    }
    RadialProfile::sampled(step, invert_values(samples, t_grid, cal, q)?)
}

/// `(∫_G |f|², C·∫ |f̂(λ)|²·density(λ) dλ)`.
pub fn parseval(f: &RadialProfile, cal: &PlancherelCalibration, q: &QuadratureSpec) -> Result<(f64, f64)> {
    let lhs = haar_integrate_radial(|t| f.eval(t).powi(2), q).value;
    let fhat = WavePacketSymbol::from_transform(f, q);
    let e = GroupElement::identity();
    let end = spectral_radius(&fhat, &e, q);
    let nodes = ((q.lambda_nodes as f64 * end / q.lambda_max / 16.0).ceil() as usize * 16).max(32);
    let failure = RefCell::new(None);
    let integrand = |l: f64| -> f64 {
        let v = fhat.eval(l, &e).norm_sqr();
        if v == 0.0 {
            return 0.0;
        }
        plancherel_density(l, q).map(|w| v * w).unwrap_or_else(|err| {
            failure.borrow_mut().get_or_insert(err);
            0.0
        })
    };
    let rhs = line_integrate(integrand, end, nodes, true).value;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok((lhs, cal.constant * rhs)),
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
    fn density_is_even_and_matches_closed_form() {
        let a = plancherel_density(2.0, &q()).unwrap();
        let b = plancherel_density(-2.0, &q()).unwrap();
        assert!((a - b).abs() < 1e-6 * a);
        for l in [1.0, 2.0, 4.0] {
            let d = plancherel_density(l, &q()).unwrap();
            assert!((d / reference::plancherel_density(l) - 1.0).abs() < 1e-4, "{l}");
        }
    }

    #[test]
    fn density_vanishes_towards_zero() {
        let d01 = plancherel_density(0.1, &q()).unwrap();
        let d005 = plancherel_density(0.05, &q()).unwrap();
        let d0 = plancherel_density(0.0, &q()).unwrap();
        assert!(d005 < d01 && d0 <= d005 && d0 == 0.0);
    }

    #[test]
    fn zero_symbol_synthesizes_zero() {
        let cal = PlancherelCalibration::fixed(1.0);
        let v = synthesize(&WavePacketSymbol::zero(), &GroupElement::diagonal(1.0), &cal, &q()).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn odd_symbol_is_rejected_when_claimed_even() {
        let r = WavePacketSymbol::x_independent("odd", |l| Complex64::new(l, 0.0), true);
        assert!(r.is_err());
        assert!(WavePacketSymbol::x_independent("odd", |l| Complex64::new(l, 0.0), false).is_ok());
    }

    #[test]
    fn non_spherical_symbol_is_rejected() {
        let r = WavePacketSymbol::x_dependent("entry", |_, x| Complex64::new(x.m12, 0.0), true);
        assert!(r.is_err());
    }
}
