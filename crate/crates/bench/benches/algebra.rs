use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use superatlas::atlas::{build_projective_superspace, quotient_atlas};
use superatlas::cohomology::{cech_cohomology, CechWindow, SheafKind};
use superatlas::criteria::SpaceSpec;
use superatlas::homological::freeness;
use superatlas::{RingDescriptor, SuperPoly};

fn multiplication(c: &mut Criterion) {
    let ring = RingDescriptor::new(&["x", "y"], &["a", "b", "c"], &["x"]).unwrap();
    let f = SuperPoly::parse(&ring, "1 + x + y^2 + a*b + x^-1*c + 3/2*a*b*c").unwrap();
    let g = SuperPoly::parse(&ring, "x^2 - y + b*c + x*a").unwrap();
    c.bench_function("superpoly_mul", |b| b.iter(|| black_box(&f) * black_box(&g)));
}

fn freeness_grassmannian(c: &mut Criterion) {
    let spec = SpaceSpec::Grassmannian { a: 1, b: 0, m: 3, n: 3 };
    let x = spec.build().unwrap();
    let v = spec.pi_field(&x).unwrap();
    c.bench_function("freeness_g1033", |b| b.iter(|| freeness(black_box(&v.fields[0]), 3).unwrap()));
}

fn cech_plane(c: &mut Criterion) {
    let p = build_projective_superspace(2, 1).unwrap();
    c.bench_function("cech_p21_structure", |b| {
        b.iter(|| cech_cohomology(&p, SheafKind::Structure, CechWindow::radius(3)).unwrap())
    });
}

fn quotient(c: &mut Criterion) {
    let spec = SpaceSpec::Projective { m: 2, n: 3 };
    let x = spec.build().unwrap();
    let v = spec.pi_field(&x).unwrap();
    c.bench_function("quotient_p23", |b| b.iter(|| quotient_atlas(&x, &v, 2).unwrap()));
}

criterion_group!(benches, multiplication, freeness_grassmannian, cech_plane, quotient);
criterion_main!(benches);
