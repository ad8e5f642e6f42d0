use proptest::prelude::*;
use sphconv::schwartz::{d_integral, seminorm, strong_inequality_check};
use sphconv::{GroupElement, QuadratureSpec, RadialProfile, SeminormIndex};

/// d(e) for r = 4 and r = 6 from an independent adaptive quadrature.
const D_E_R4: f64 = 0.520_835_558_009_610_8;
const D_E_R6: f64 = 0.11059453274097111;

#[test]
fn d_identity_oracle() {
    let q = QuadratureSpec::default();
    let e = GroupElement::identity();
    assert!((d_integral(&e, 4, &q).unwrap() / D_E_R4 - 1.0).abs() < 1e-10);
    assert!((d_integral(&e, 6, &q).unwrap() / D_E_R6 - 1.0).abs() < 1e-10);
}

#[test]
fn d_is_translation_invariant() {
    let q = QuadratureSpec::default();
    let d0 = d_integral(&GroupElement::identity(), 4, &q).unwrap();
    for x in [
        GroupElement::diagonal(1.0),
        GroupElement::unipotent(2.0) * GroupElement::rotation(0.7),
    ] {
        assert!((d_integral(&x, 4, &q).unwrap() / d0 - 1.0).abs() < 1e-6);
    }
}

#[test]
fn strong_inequality_designed_pair() {
    let q = QuadratureSpec::default();
    let e = GroupElement::identity();
    let good = RadialProfile::gaussian(1.0).unwrap();
    let bad = RadialProfile::custom("1/(1+t^2)", sphconv::profile::Decay::Unknown, |t| 1.0 / (1.0 + t * t));
    assert!(strong_inequality_check(&good, &e, 6, &q).unwrap().holds);
    assert!(!strong_inequality_check(&bad, &e, 6, &q).unwrap().holds);
}

fn index() -> impl Strategy<Value = SeminormIndex> {
    (0usize..=2, 0usize..=2, 0u32..=8).prop_map(|(a, b, r)| SeminormIndex::new(a, b, r, 2.0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homogeneous(idx in index(), alpha in -4.0..4.0f64) {
        let q = QuadratureSpec::default();
        let f = RadialProfile::gaussian(1.0).unwrap();
        let lhs = seminorm(&f.scaled(alpha), &idx, &q);
        let rhs = alpha.abs() * seminorm(&f, &idx, &q);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
    }

    #[test]
    fn subadditive(idx in index(), w in 0.3..2.0f64) {
        let q = QuadratureSpec::default();
        let f = RadialProfile::gaussian(1.0).unwrap();
        let g = RadialProfile::gaussian(w).unwrap().scaled(-0.7);
        prop_assert!(seminorm(&f.plus(&g), &idx, &q) <= seminorm(&f, &idx, &q) + seminorm(&g, &idx, &q) + 1e-10);
    }

    #[test]
    fn monotone_in_weight(idx in index()) {
        let q = QuadratureSpec::default();
        let f = RadialProfile::cauchy_decay(6.0).unwrap();
        let next = SeminormIndex { r: idx.r + 1, ..idx };
        prop_assert!(seminorm(&f, &idx, &q) <= seminorm(&f, &next, &q) + 1e-10);
    }
}
