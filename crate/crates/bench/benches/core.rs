use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use sphconv::schwartz::d_integral;
use sphconv::spherical::phi_radial;
use sphconv::transform::hc_value;
use sphconv::{GroupElement, QuadratureSpec, RadialProfile, SpectralParam, SphericalConvolution, Strategy};

fn spherical(c: &mut Criterion) {
    let mut g = c.benchmark_group("phi");
    for (name, l, t) in [
        ("real", Complex64::new(3.0, 0.0), 2.0),
        ("complex", Complex64::new(1.0, 0.7), 8.0),
    ] {
        g.bench_function(name, |b| b.iter(|| phi_radial(black_box(l), black_box(t), 256)));
    }
    g.finish();
}

fn transform(c: &mut Criterion) {
    let q = QuadratureSpec::default();
    let f = RadialProfile::gaussian(1.0).unwrap();
    c.bench_function("hc_value/gaussian", |b| {
        b.iter(|| hc_value(&f, black_box(SpectralParam::real(2.5)), &q))
    });
}

fn convolution(c: &mut Criterion) {
    let q = QuadratureSpec::default();
    let x = GroupElement::rotation(0.4) * GroupElement::diagonal(1.5);
    let mut g = c.benchmark_group("convolution");
    g.sample_size(20);
    for strategy in [Strategy::Direct, Strategy::ProductFormula] {
        let s = SphericalConvolution::new(
            SpectralParam::real(2.0),
            RadialProfile::gaussian(1.0).unwrap(),
            strategy,
        );
        s.evaluate(&x, &q).unwrap();
        g.bench_function(format!("{strategy:?}"), |b| b.iter(|| s.evaluate(black_box(&x), &q)));
    }
    g.finish();
}

fn d_of_x(c: &mut Criterion) {
    let q = QuadratureSpec::default();
    let mut g = c.benchmark_group("d_integral");
    g.sample_size(10);
    g.bench_function("a1", |b| {
        b.iter(|| d_integral(black_box(&GroupElement::diagonal(1.0)), 4, &q))
    });
    g.finish();
}

criterion_group!(benches, spherical, transform, convolution, d_of_x);
criterion_main!(benches);
