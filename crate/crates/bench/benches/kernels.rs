use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use cellgeom_core::analytic::{interference_ccdf, phi_beta, phi_beta_complex, sinr_ccdf, y_cdf};
use cellgeom_core::numerics::gamma_star_complex;
use cellgeom_core::simulate::{hex_pattern, stream_rng, UserSampler};
use cellgeom_core::{InversionConfig, PropagationModel, ShadowingSpec, SinrLaw};

fn urban_law() -> SinrLaw {
    let lambda = 1.0 / (PI * 0.26 * 0.26);
    SinrLaw::from_model(lambda, &PropagationModel::urban_macro(), &ShadowingSpec::LogNormal { sigma_db: 12.0 }).unwrap()
}

fn special(c: &mut Criterion) {
    c.bench_function("phi_beta series z=10", |b| b.iter(|| phi_beta(3.52, black_box(10.0))));
    c.bench_function("phi_beta continued fraction z=80", |b| b.iter(|| phi_beta(3.52, black_box(80.0))));
    let z = num_complex::Complex64::new(9.2, 120.0);
    c.bench_function("phi_beta complex", |b| b.iter(|| phi_beta_complex(3.52, black_box(z))));
    c.bench_function("gamma_star complex", |b| b.iter(|| gamma_star_complex(-0.5, black_box(z))));
}

fn inversion(c: &mut Criterion) {
    let cfg = InversionConfig::default();
    c.bench_function("interference ccdf", |b| b.iter(|| interference_ccdf(3.52, black_box(2.0), &cfg)));
    let law = urban_law();
    c.bench_function("y_cdf noisy", |b| b.iter(|| y_cdf(&law, black_box(1.0))));
    c.bench_function("sinr ccdf t=0.1", |b| b.iter(|| sinr_ccdf(&law, black_box(0.1))));
}

fn sampling(c: &mut Criterion) {
    let pattern = hex_pattern(0.26, 30).unwrap();
    let prop = PropagationModel::urban_macro();
    let mut sampler = UserSampler::new(&prop, &ShadowingSpec::LogNormal { sigma_db: 12.0 }).unwrap();
    let mut rng = stream_rng(1, 0, 0);
    c.bench_function("typical user, 900 stations", |b| b.iter(|| sampler.sample(&pattern, &mut rng)));
}

criterion_group!(benches, special, inversion, sampling);
criterion_main!(benches);
