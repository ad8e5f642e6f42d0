use proptest::prelude::*;
use sphconv::convolution::{kappa, kappa_expected, taylor_partial_sum};
use sphconv::group::element_from_unit;
use sphconv::transform::hc_value;
use sphconv::{
    GroupElement, QuadratureSpec, RadialProfile, SpectralParam, SphericalConvolution, Strategy, TangentDirection,
};

#[test]
fn identity_gives_transform() {
    let q = QuadratureSpec::default();
    let f = RadialProfile::compact_bump(2.0).unwrap();
    let l = SpectralParam::new(1.5, 0.3);
    let s = SphericalConvolution::new(l, f.clone(), Strategy::Direct);
    assert_eq!(
        s.evaluate(&GroupElement::identity(), &q).unwrap(),
        hc_value(&f, l, &q).unwrap()
    );
}

#[test]
fn kappa_is_the_spherical_function() {
    let q = QuadratureSpec::default();
    let witnesses = vec![
        RadialProfile::gaussian(1.0).unwrap(),
        RadialProfile::gaussian(2.0).unwrap(),
    ];
    let x = TangentDirection::new(0.2, -0.4, 0.1);
    let l = SpectralParam::real(2.0);
    let k = kappa(l, &x, &witnesses, &q).unwrap();
    assert!((k - kappa_expected(l, &x, &q)).norm() < 1e-5);
}

#[test]
fn taylor_sum_at_zero_step() {
    let q = QuadratureSpec::default();
    let s = SphericalConvolution::new(
        SpectralParam::real(1.0),
        RadialProfile::gaussian(1.0).unwrap(),
        Strategy::Direct,
    );
    let x = GroupElement::diagonal(0.4);
    let p = taylor_partial_sum(&s, &x, &TangentDirection::H1, 0.0, 6, &q).unwrap();
    assert_eq!(p.value, s.evaluate(&x, &q).unwrap());
}

#[test]
fn taylor_rejects_long_steps() {
    let q = QuadratureSpec::default();
    let s = SphericalConvolution::new(
        SpectralParam::real(1.0),
        RadialProfile::gaussian(1.0).unwrap(),
        Strategy::Direct,
    );
    assert!(taylor_partial_sum(&s, &GroupElement::identity(), &TangentDirection::H1, 1.5, 4, &q).is_err());
    assert!(taylor_partial_sum(&s, &GroupElement::identity(), &TangentDirection::H1, 0.1, 9, &q).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn strategies_agree(u in (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), re in -5.0..5.0f64, im in -0.8..0.8f64) {
        let q = QuadratureSpec::default();
        let x = element_from_unit(u.0, u.1, u.2, 3.0);
        let s = SphericalConvolution::new(SpectralParam::new(re, im), RadialProfile::gaussian(1.0).unwrap(), Strategy::Direct);
        let d = s.evaluate(&x, &q).unwrap();
        let p = s.with_strategy(Strategy::ProductFormula).evaluate(&x, &q).unwrap();
        prop_assert!((d - p).norm() <= 1e-5 * (1.0 + p.norm()));
    }

    #[test]
    fn left_k_invariant(u in (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), th in 0.0..6.3f64, re in 0.0..4.0f64) {
        let q = QuadratureSpec::default();
        let x = element_from_unit(u.0, u.1, u.2, 2.5);
        let s = SphericalConvolution::new(SpectralParam::real(re), RadialProfile::cauchy_decay(4.0).unwrap(), Strategy::Direct);
        let a = s.evaluate(&x, &q).unwrap();
        let b = s.evaluate(&(GroupElement::rotation(th) * x), &q).unwrap();
        prop_assert!((a - b).norm() <= 1e-8 * (1.0 + a.norm()));
    }
}
