use proptest::prelude::*;
use sphconv::wavepacket::{calibrate, invert_values, plancherel_density};
use sphconv::{reference, QuadratureSpec, RadialProfile, SpectralSamples};

#[test]
fn calibration_recovers_the_inversion_constant() {
    let q = QuadratureSpec::default();
    let cal = calibrate(&RadialProfile::gaussian(1.0).unwrap(), &q).unwrap();
    assert!((cal.constant / reference::INVERSION_CONSTANT - 1.0).abs() < 1e-6);
    assert!(cal.residual < 1e-4);
}

#[test]
fn inversion_round_trip() {
    let q = QuadratureSpec::default();
    let f = RadialProfile::gaussian(1.0).unwrap();
    let cal = calibrate(&f, &q).unwrap();
    let samples = SpectralSamples::of_transform_on_line(&f, 0.1, &q).unwrap();
    let ts: Vec<f64> = (0..=30).map(|j| 0.1 * j as f64).collect();
    let v = invert_values(&samples, &ts, &cal, &q).unwrap();
    for (t, v) in ts.iter().zip(v) {
        assert!((f.eval(*t) - v).abs() < 1e-4, "t = {t}");
    }
}

#[test]
fn density_vanishes_at_origin() {
    let q = QuadratureSpec::default();
    assert_eq!(plancherel_density(0.0, &q).unwrap(), 0.0);
    assert!(plancherel_density(0.05, &q).unwrap() < plancherel_density(0.1, &q).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn density_matches_closed_form(l in 0.1..12.0f64) {
        let q = QuadratureSpec::default();
        let got = plancherel_density(l, &q).unwrap();
        prop_assert!((got / reference::plancherel_density(l) - 1.0).abs() <= 1e-6);
        prop_assert!((plancherel_density(-l, &q).unwrap() - got).abs() <= 1e-12 * got);
    }
}
