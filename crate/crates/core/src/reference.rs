//! Closed-form and series values used as independent oracles.
//!
//! Nothing here is used by the main evaluation paths; these routines exist
//! so tests and the verification suites can compare quadrature results
//! against formulas derived by other means.

use std::f64::consts::PI;

use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` for complex `z` (Lanczos, `g = 7`), with reflection for
/// `Re z < ½`. The imaginary part is determined only modulo `2π`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let pi = Complex64::new(PI, 0.0);
        return pi.ln() - (pi * z).sin().ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `c(λ) = Γ(iλ/2) / (√π·Γ(½ + iλ/2))`, the coefficient of `e^{(iλ-1)t}` in
/// the large-`t` expansion of `φ_λ(a_t)`.
pub fn c_function(lambda: Complex64) -> Complex64 {
    let z = Complex64::i() * lambda * 0.5;
    (ln_gamma(z) - ln_gamma(z + 0.5)).exp() / PI.sqrt()
}

/// `½|c(λ)|⁻² = (π/4)·λ·tanh(πλ/2)` for real `λ`.
pub fn plancherel_density(lambda: f64) -> f64 {
    0.25 * PI * lambda * (0.5 * PI * lambda).tanh()
}

/// Inversion constant paired with [`plancherel_density`] under
/// `vol(K) = 1` and Haar density `sinh 2t`.
pub const INVERSION_CONSTANT: f64 = 1.0 / PI;

/// `φ_λ(a_t) = P_ν(cosh 2t)` with `ν = (iλ - 1)/2`, summed as
/// `cosh(t)^{2ν}·₂F₁(-ν, -ν; 1; tanh²t)`.
///
/// The series converges for all `t` but slowly once `tanh²t → 1`; keep
/// `t ≤ 4`.
pub fn legendre_phi(lambda: Complex64, t: f64) -> Complex64 {
    let nu = (Complex64::i() * lambda - 1.0) * 0.5;
    let x = t.tanh().powi(2);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut n = 0.0;
    loop {
        let a = n - nu;
        term *= a * a * (x / ((n + 1.0) * (n + 1.0)));
        sum += term;
        n += 1.0;
        if term.norm() < 1e-18 * sum.norm() || n > 2.0e6 {
            break;
        }
    }
    (2.0 * nu * t.cosh().ln()).exp() * sum
}

/// `Ξ(a_t) = P_{-1/2}(cosh 2t) = (2/π)·K(tanh t)/cosh t`, with the complete
/// elliptic integral `K` from the modulus form of the AGM.
pub fn xi_elliptic(t: f64) -> f64 {
    // complementary modulus √(1 - tanh²t) = sech t
    let mut a = 1.0;
    let mut b = 1.0 / t.cosh();
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = m;
    }
    let big_k = PI / (2.0 * a);
    2.0 / PI * big_k / t.cosh()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_at_known_points() {
        let one = gamma(Complex64::new(1.0, 0.0));
        assert!((one - 1.0).norm() < 1e-14);
        let half = gamma(Complex64::new(0.5, 0.0));
        assert!((half.re - PI.sqrt()).abs() < 1e-14);
        let five = gamma(Complex64::new(5.0, 0.0));
        assert!((five.re - 24.0).abs() < 1e-11);
        // reflection branch
        let neg = gamma(Complex64::new(-0.5, 0.0));
        assert!((neg.re + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn gamma_modulus_on_imaginary_axis() {
        // |Γ(iy)|² = π / (y sinh πy)
        for y in [0.3, 1.0, 2.5, 7.0] {
            let g = gamma(Complex64::new(0.0, y)).norm_sqr();
            let exact = PI / (y * (PI * y).sinh());
            assert!((g / exact - 1.0).abs() < 1e-12, "{y}");
        }
    }

    #[test]
    fn density_matches_c_modulus() {
        for l in [0.1, 1.0, 2.0, 4.0, 10.0] {
            let d = 0.5 / c_function(Complex64::new(l, 0.0)).norm_sqr();
            assert!((d / plancherel_density(l) - 1.0).abs() < 1e-12, "{l}");
        }
    }

    #[test]
    fn legendre_trivial_cases() {
        let minus_i = Complex64::new(0.0, -1.0);
        assert!((legendre_phi(minus_i, 2.0) - 1.0).norm() < 1e-15);
        assert!((legendre_phi(Complex64::new(3.0, 0.2), 0.0) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn legendre_at_zero_matches_elliptic() {
        for t in [0.3, 1.0, 2.0] {
            let a = legendre_phi(Complex64::new(0.0, 0.0), t);
            assert!((a.re - xi_elliptic(t)).abs() < 1e-13, "{t}");
            assert!(a.im.abs() < 1e-15);
        }
    }
}
