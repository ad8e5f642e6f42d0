use num_complex::Complex64;
use proptest::prelude::*;
use sphconv::transform::{convolve_profiles, hc_value};
use sphconv::{QuadratureSpec, RadialProfile, SpectralParam, SpectralSamples};

/// ∫ e^{-(t/w)²} φ_λ(a_t) sinh 2t dt at 30 digits.
const HC_ORACLE: [(f64, f64, f64); 5] = [
    (1.0, 0.0, 1.4757686379968883),
    (1.0, 1.0, 1.069_630_711_626_514),
    (1.0, 3.0, 0.068_512_345_514_332_45),
    (0.5, 2.0, 0.21137589734320686),
    (2.0, 1.0, 1.648_533_120_823_087),
];

#[test]
fn gaussian_transform_matches_frozen_oracle() {
    let q = QuadratureSpec::default();
    for (w, l, v) in HC_ORACLE {
        let f = RadialProfile::gaussian(w).unwrap();
        let got = hc_value(&f, SpectralParam::real(l), &q).unwrap();
        assert!((got - Complex64::new(v, 0.0)).norm() < 1e-10, "w = {w}, λ = {l}: {got}");
    }
}

/// Same integral for `compact_bump:2`.
const BUMP_ORACLE: [(f64, f64); 3] = [
    (0.0, 2.3911760048885882),
    (1.0, 1.764515074825816),
    (5.0, 0.048_071_171_239_458_1),
];

#[test]
fn bump_transform_matches_frozen_oracle() {
    let q = QuadratureSpec::default();
    let f = RadialProfile::compact_bump(2.0).unwrap();
    for (l, v) in BUMP_ORACLE {
        let got = hc_value(&f, SpectralParam::real(l), &q).unwrap();
        assert!((got - Complex64::new(v, 0.0)).norm() < 1e-12, "λ = {l}: {got}");
    }
}

#[test]
fn convolution_theorem() {
    let q = QuadratureSpec::default();
    let f = RadialProfile::gaussian(1.0).unwrap();
    let g = RadialProfile::cauchy_decay(4.0).unwrap();
    let h = convolve_profiles(&f, &g, &q).unwrap();
    for l in [0.0, 1.5, 4.0] {
        let l = SpectralParam::real(l);
        let lhs = hc_value(&h, l, &q).unwrap();
        let rhs = hc_value(&f, l, &q).unwrap() * hc_value(&g, l, &q).unwrap();
        assert!((lhs - rhs).norm() < 1e-6);
    }
}

#[test]
fn samples_csv_round_trip() {
    let q = QuadratureSpec::default();
    let f = RadialProfile::gaussian(1.0).unwrap();
    let s = SpectralSamples::of_transform(&f, vec![-1.0, 0.0, 2.0], vec![0.0, 0.5], &q).unwrap();
    let back = SpectralSamples::from_csv(&s.to_csv()).unwrap();
    assert_eq!(back.re_axis(), s.re_axis());
    assert_eq!(back.im_axis(), s.im_axis());
    assert_eq!(back.values(), s.values());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_in_profile(a in -3.0..3.0f64, b in -3.0..3.0f64, l in -6.0..6.0f64, im in -0.9..0.9f64) {
        let q = QuadratureSpec::default();
        let f = RadialProfile::gaussian(1.0).unwrap();
        let g = RadialProfile::compact_bump(2.0).unwrap();
        let l = SpectralParam::new(l, im);
        let lhs = hc_value(&f.scaled(a).plus(&g.scaled(b)), l, &q).unwrap();
        let rhs = hc_value(&f, l, &q).unwrap() * a + hc_value(&g, l, &q).unwrap() * b;
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn weyl_invariant(l in -10.0..10.0f64, im in -0.9..0.9f64) {
        let q = QuadratureSpec::default();
        let f = RadialProfile::gaussian(0.7).unwrap();
        let l = SpectralParam::new(l, im);
        prop_assert!((hc_value(&f, l, &q).unwrap() - hc_value(&f, l.weyl(), &q).unwrap()).norm() <= 1e-8);
    }

    #[test]
    fn conjugate_symmetric(l in -10.0..10.0f64, im in -0.9..0.9f64) {
        let q = QuadratureSpec::default();
        let f = RadialProfile::cauchy_decay(4.0).unwrap();
        let l = SpectralParam::new(l, im);
        prop_assert!((hc_value(&f, l.conj(), &q).unwrap() - hc_value(&f, l, &q).unwrap().conj()).norm() <= 1e-10);
    }
}
