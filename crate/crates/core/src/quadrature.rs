//! Integration engines for the three domains that appear throughout the
//! crate: the circle `K = SO(2)` (normalized to unit volume), the radial
//! half-line of the Cartan decomposition, and the real spectral line.
//!
//! Every engine sums in a fixed pairwise order so that results are
//! bit-reproducible for a given input.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Sub};
use std::rc::Rc;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result, Warning};

/// Scalars the engines can integrate.
pub trait Scalar: Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Pairwise (cascade) summation; deterministic and with `O(log n)` error growth.
pub fn pairwise_sum<T: Scalar>(values: &[T]) -> T {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().fold(T::zero(), |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Numerical parameters shared by every operation that integrates over the
/// group or the spectral line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Node count for integrals over `K`.
    pub k_nodes: usize,
    /// Radial truncation point.
    pub t_max: f64,
    /// Number of equal Gauss-Legendre panels on `[0, t_max]`.
    pub t_panels: usize,
    /// Spectral truncation point.
    pub lambda_max: f64,
    /// Node count on `[-lambda_max, lambda_max]`.
    pub lambda_nodes: usize,
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            k_nodes: 256,
            t_max: 30.0,
            t_panels: 60,
            lambda_max: 40.0,
            lambda_nodes: 800,
            tol: 1e-8,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let counts = [self.k_nodes, self.t_panels, self.lambda_nodes];
        if counts.iter().any(|&c| c < 4) {
            return Err(Error::Domain(format!("quadrature node counts must be >= 4: {self:?}")));
        }
        if !(self.t_max > 0.0 && self.lambda_max > 0.0) {
            return Err(Error::Domain("truncation points must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(Error::Domain(format!("tol must lie in (0, 1e-2], got {}", self.tol)));
        }
        Ok(())
    }

    /// Width of one radial panel.
    pub fn panel_width(&self) -> f64 {
        self.t_max / self.t_panels as f64
    }

    /// Same spec with all node counts doubled.
    pub fn refined(&self) -> Self {
        Self {
            k_nodes: 2 * self.k_nodes,
            t_panels: 2 * self.t_panels,
            lambda_nodes: 2 * self.lambda_nodes,
            ..*self
        }
    }

    pub fn with_t_max(&self, t_max: f64) -> Self {
        let width = self.panel_width();
        Self {
            t_max,
            t_panels: (t_max / width).round().max(4.0) as usize,
            ..*self
        }
    }
}

/// Gauss points per radial panel.
pub const RADIAL_ORDER: usize = 12;
/// Gauss points per spectral panel.
pub const LINE_ORDER: usize = 8;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

thread_local! {
    static GL_CACHE: RefCell<HashMap<usize, Rc<GaussLegendre>>> = RefCell::new(HashMap::new());
}

pub(crate) fn gauss_legendre(n: usize) -> Rc<GaussLegendre> {
    GL_CACHE.with(|c| {
        c.borrow_mut()
            .entry(n)
            .or_insert_with(|| Rc::new(GaussLegendre::new(n)))
            .clone()
    })
}

/// Result of a quadrature engine: value, a refinement-based error estimate
/// and any diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
    pub warnings: Vec<Warning>,
}

/// Which integration domain a [`GridFunction`] lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainTag {
    Circle,
    Radial,
    Spectral,
}

/// Samples of a function on an ordered set of nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    nodes: Vec<f64>,
    values: Vec<T>,
    domain: DomainTag,
}

impl<T: Scalar> GridFunction<T> {
    pub fn new(nodes: Vec<f64>, values: Vec<T>, domain: DomainTag) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::Grid(format!(
                "{} nodes but {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::Grid("nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes, values, domain })
    }

    pub fn sample(nodes: Vec<f64>, domain: DomainTag, f: impl Fn(f64) -> T) -> Result<Self> {
        let values = nodes.iter().map(|&x| f(x)).collect();
        Self::new(nodes, values, domain)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn domain(&self) -> DomainTag {
        self.domain
    }
}

/// Mean of `f` over the circle with `n` equispaced nodes.
pub fn circle_mean<T: Scalar>(f: impl Fn(f64) -> T, n: usize) -> T {
    let values: Vec<T> = (0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect();
    pairwise_sum(&values) * (1.0 / n as f64)
}

/// `∫_K F dk` with `vol(K) = 1`, for `F` given as a function of the angle.
///
/// The error estimate compares against the embedded half-resolution rule
/// (every other node), so it costs nothing extra when `n` is even.
pub fn circle_integrate<T: Scalar>(f: impl Fn(f64) -> T, n: usize) -> Integral<T> {
    let values: Vec<T> = (0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect();
    let full = pairwise_sum(&values) * (1.0 / n as f64);
    let error = if n.is_multiple_of(2) && n >= 4 {
        let half: Vec<T> = values.iter().step_by(2).copied().collect();
        (full - pairwise_sum(&half) * (2.0 / n as f64)).modulus()
    } else {
        f64::NAN
    };
    Integral {
        value: full,
        error,
        warnings: Vec::new(),
    }
}

/// Composite Gauss-Legendre on `[a, b]` with equal panels. Returns the
/// value and the largest integrand modulus seen.
pub fn composite_gauss<T: Scalar>(f: impl Fn(f64) -> T, a: f64, b: f64, panels: usize, order: usize) -> (T, f64) {
    let rule = gauss_legendre(order);
    let width = (b - a) / panels as f64;
    let mut terms = Vec::with_capacity(panels * order);
    let mut peak: f64 = 0.0;
    for p in 0..panels {
        let lo = a + width * p as f64;
        for (x, w) in rule.mapped(lo, lo + width) {
            let v = f(x);
            peak = peak.max(v.modulus());
            terms.push(v * w);
        }
    }
    (pairwise_sum(&terms), peak)
}

/// Halvings towards each cut in [`split_gauss`].
const SPLIT_LEVELS: usize = 16;

/// [`composite_gauss`] on `[a, b]` split at `cuts`, with panels no wider
/// than `width` and halving towards each cut.
pub fn split_gauss<T: Scalar>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    cuts: &[f64],
    width: f64,
    order: usize,
) -> (T, f64) {
    let mut edges = vec![a, b];
    for &c in cuts {
        edges.push(c);
        let mut h = width;
        for _ in 0..SPLIT_LEVELS {
            h *= 0.5;
            edges.extend([c - h, c + h]);
        }
    }
    edges.retain(|e| *e >= a && *e <= b);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut total = T::zero();
    let mut peak: f64 = 0.0;
    for w in edges.windows(2) {
        let panels = ((w[1] - w[0]) / width - 1e-9).ceil().max(1.0) as usize;
        let (v, p) = composite_gauss(&f, w[0], w[1], panels, order);
        total = total + v;
        peak = peak.max(p);
    }
    (total, peak)
}

/// Levels of geometric grading towards the kink in [`graded_gauss`].
const GRADING_LEVELS: usize = 24;

/// Composite Gauss-Legendre on `[a, b]` for an integrand with a kink at
/// `at`: panels of width at most `width` away from it and geometrically
/// halving panels towards it.
pub fn graded_gauss<T: Scalar>(f: impl Fn(f64) -> T, a: f64, b: f64, at: f64, width: f64, order: usize) -> T {
    let mut cuts = vec![a, b];
    if at > a && at < b {
        cuts.push(at);
    }
    let mut h = width;
    for _ in 0..GRADING_LEVELS {
        for c in [at - h, at + h] {
            if c > a && c < b {
                cuts.push(c);
            }
        }
        h *= 0.5;
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = T::zero();
    for w in cuts.windows(2) {
        let panels = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        total = total + composite_gauss(&f, w[0], w[1], panels, order).0;
    }
    total
}

/// `∫_0^{t_max} F(t) dt` by composite Gauss-Legendre.
pub fn radial_integrate<T: Scalar>(
    f: impl Fn(f64) -> T,
    t_max: f64,
    panels: usize,
    nodes_per_panel: usize,
) -> Integral<T> {
    let (value, peak) = composite_gauss(&f, 0.0, t_max, panels, nodes_per_panel);
    let (coarse, _) = composite_gauss(&f, 0.0, t_max, (panels / 2).max(1), nodes_per_panel);
    let mut warnings = Vec::new();
    let end = f(t_max).modulus();
    if end > 1e-12 * peak {
        warnings.push(Warning::Truncation {
            at: t_max,
            magnitude: end,
        });
    }
    Integral {
        value,
        error: (value - coarse).modulus(),
        warnings,
    }
}

/// `∫_{-L}^{L} F(λ) dλ`; when `even` is set only `[0, L]` is evaluated.
pub fn line_integrate<T: Scalar>(f: impl Fn(f64) -> T, lambda_max: f64, nodes: usize, even: bool) -> Integral<T> {
    let panels = (nodes / LINE_ORDER).max(2);
    let run = |panels: usize| -> (T, f64) {
        if even {
            let (v, peak) = composite_gauss(&f, 0.0, lambda_max, (panels / 2).max(1), LINE_ORDER);
            (v * 2.0, peak)
        } else {
            composite_gauss(&f, -lambda_max, lambda_max, panels, LINE_ORDER)
        }
    };
    let (value, peak) = run(panels);
    let (coarse, _) = run((panels / 2).max(2));
    let mut warnings = Vec::new();
    let end = f(lambda_max).modulus().max(f(-lambda_max).modulus());
    if end > 1e-12 * peak {
        warnings.push(Warning::Truncation {
            at: lambda_max,
            magnitude: end,
        });
    }
    Integral {
        value,
        error: (value - coarse).modulus(),
        warnings,
    }
}

/// Samples on `x₀ + j·h`, interpolated with 8-point local Lagrange
/// stencils in barycentric form.
#[derive(Debug, Clone, PartialEq)]
pub struct EquispacedTable<T> {
    start: f64,
    step: f64,
    values: Vec<T>,
}

const STENCIL: usize = 8;
// (-1)^j C(7, j)
const BARYCENTRIC: [f64; STENCIL] = [1.0, -7.0, 21.0, -35.0, 35.0, -21.0, 7.0, -1.0];

impl<T: Scalar> EquispacedTable<T> {
    pub fn new(start: f64, step: f64, values: Vec<T>) -> Result<Self> {
        if values.len() < STENCIL {
            return Err(Error::Grid(format!(
                "need at least {STENCIL} samples, got {}",
                values.len()
            )));
        }
        if !(step > 0.0 && step.is_finite() && start.is_finite()) {
            return Err(Error::Grid(format!("invalid step {step}")));
        }
        Ok(Self { start, step, values })
    }

    pub fn sample(start: f64, step: f64, count: usize, f: impl Fn(f64) -> T) -> Result<Self> {
        let values = (0..count).map(|j| f(start + step * j as f64)).collect();
        Self::new(start, step, values)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Interpolated value; stencils are shifted inward near the ends, so
    /// points slightly outside `[start, end]` extrapolate.
    pub fn eval(&self, x: f64) -> T {
        let pos = (x - self.start) / self.step;
        let base =
            (pos.floor() as i64 - (STENCIL as i64 / 2 - 1)).clamp(0, (self.values.len() - STENCIL) as i64) as usize;
        let s = pos - base as f64;
        let mut num = T::zero();
        let mut den = 0.0;
        for (j, w) in BARYCENTRIC.iter().enumerate() {
            let d = s - j as f64;
            if d == 0.0 {
                return self.values[base + j];
            }
            let c = w / d;
            num = num + self.values[base + j] * c;
            den += c;
        }
        num * (1.0 / den)
    }
}

/// A node of a [`ZonalRule`]: the angle `θ ∈ (0, π/2)` together with
/// `cos²θ`, `sin²θ` and their logarithms (accurate even when one of them
/// underflows).
#[derive(Debug, Clone, Copy)]
pub struct ZonalNode {
    pub u: f64,
    pub theta: f64,
    pub cos2: f64,
    pub sin2: f64,
    pub ln_cos2: f64,
    pub ln_sin2: f64,
    weight: f64,
}

/// Half-width of the log-tan window beyond the transition points; the
/// weight decays like `e^{-|u|}`.
const ZONAL_TAIL: f64 = 38.0;
const ZONAL_BASE_STEP: f64 = 0.25;

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

struct ZonalTable {
    step: f64,
    // Nodes u = j * step for j in [offset, offset + nodes.len()).
    offset: i64,
    nodes: Vec<ZonalNode>,
}

impl ZonalTable {
    fn node(step: f64, j: i64) -> ZonalNode {
        let u = j as f64 * step;
        let ln_cos2 = -softplus(2.0 * u);
        let ln_sin2 = -softplus(-2.0 * u);
        ZonalNode {
            u,
            theta: u.exp().atan(),
            cos2: ln_cos2.exp(),
            sin2: ln_sin2.exp(),
            ln_cos2,
            ln_sin2,
            weight: 0.5 / u.cosh(),
        }
    }

    fn ensure(&mut self, lo: i64, hi: i64) {
        let end = self.offset + self.nodes.len() as i64;
        if lo >= self.offset && hi < end {
            return;
        }
        let new_lo = lo.min(self.offset);
        let new_hi = hi.max(end - 1);
        let mut nodes = Vec::with_capacity((new_hi - new_lo + 1) as usize);
        for j in new_lo..=new_hi {
            if j >= self.offset && j < end {
                nodes.push(self.nodes[(j - self.offset) as usize]);
            } else {
                nodes.push(Self::node(self.step, j));
            }
        }
        self.offset = new_lo;
        self.nodes = nodes;
    }
}

thread_local! {
    static ZONAL_TABLES: RefCell<HashMap<usize, ZonalTable>> = RefCell::new(HashMap::new());
}

/// Quadrature for K-averages of functions of `v₊cos²θ + v₋sin²θ`.
///
/// Such integrands are sharply peaked once `v₊/v₋` is far from one, which
/// defeats the equispaced rule. With `tan θ = e^u` the integrand becomes a
/// smooth, exponentially decaying function of `u` whose features sit at
/// `u = 0` and `u = ½ ln(v₊/v₋)`, analytic in the strip `|Im u| < π/2`,
/// so the trapezoidal rule in `u` converges geometrically for any ratio.
/// The weights are renormalized so that constants integrate exactly.
pub struct ZonalRule {
    nodes: Vec<ZonalNode>,
    norm: f64,
}

impl ZonalRule {
    /// `ln_ratio = ln(v₊/v₋)`; `refinement ≥ 1` divides the base step.
    pub fn new(ln_ratio: f64, refinement: usize) -> Self {
        let refinement = refinement.max(1);
        let step = ZONAL_BASE_STEP / refinement as f64;
        let center = 0.5 * ln_ratio;
        let lo = ((center.min(0.0) - ZONAL_TAIL) / step).floor() as i64;
        let hi = ((center.max(0.0) + ZONAL_TAIL) / step).ceil() as i64;
        let nodes: Vec<ZonalNode> = ZONAL_TABLES.with(|tables| {
            let mut tables = tables.borrow_mut();
            let table = tables.entry(refinement).or_insert_with(|| ZonalTable {
                step,
                offset: 0,
                nodes: Vec::new(),
            });
            table.ensure(lo, hi);
            let a = (lo - table.offset) as usize;
            let b = (hi - table.offset) as usize;
            table.nodes[a..=b].to_vec()
        });
        let weights: Vec<f64> = nodes.iter().map(|n| n.weight).collect();
        let norm = pairwise_sum(&weights);
        Self { nodes, norm }
    }

    /// Refinement level that resolves oscillation of frequency `freq` in
    /// `u`; doubling `k_nodes` past 256 halves the step.
    pub fn refinement_for(freq: f64, k_nodes: usize) -> usize {
        let base = (k_nodes / 256).max(1);
        // trapezoid error ~ exp(-(2π/h - freq)·π/2); keep the exponent near -31
        let needed = 2.0 * PI / (freq.abs() + 20.0);
        let from_freq = (ZONAL_BASE_STEP / needed).ceil().max(1.0) as usize;
        base * from_freq
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[ZonalNode] {
        &self.nodes
    }

    /// `(1/2π) ∫_0^{2π} F(θ) dθ` for `F` invariant under `θ ↦ -θ` and
    /// `θ ↦ π - θ`, sampled on `(0, π/2)`.
    pub fn mean<T: Scalar>(&self, f: impl Fn(&ZonalNode) -> T) -> T {
        let terms: Vec<T> = self.nodes.iter().map(|n| f(n) * n.weight).collect();
        pairwise_sum(&terms) * (1.0 / self.norm)
    }

    /// Weighted sum without normalization, scaled by `2h/π`; used to check
    /// the renormalization is a no-op at working precision.
    pub fn raw_mass(&self) -> f64 {
        let step = self.nodes.get(1).map_or(0.0, |n| n.u - self.nodes[0].u);
        self.norm * step / FRAC_PI_2
    }
}
