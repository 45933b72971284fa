use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use saito_hodge::coxeter::builtin;
use saito_hodge::expr::{parse, Scope, Value};
use saito_hodge::forms::LogForm;
use saito_hodge::hodge::decompose_form;
use saito_hodge::saito::MatrixFamily;

fn family(name: &str) -> MatrixFamily {
    MatrixFamily::new(Arc::new(builtin(name).unwrap())).unwrap()
}

fn poly_mul(c: &mut Criterion) {
    let f = family("B4");
    let (q2, q3) = (f.ambient().q_pow(2), f.ambient().q_pow(3));
    c.bench_function("poly_mul/b4_q2_q3", |b| b.iter(|| black_box(&*q2).mul_poly(black_box(&*q3))));
}

fn det(c: &mut Criterion) {
    let mut g = c.benchmark_group("det_jacobian");
    for name in ["A3", "B4"] {
        let f = family(name);
        g.bench_with_input(BenchmarkId::from_parameter(name), &f, |b, f| b.iter(|| f.j().det()));
    }
    g.finish();
}

fn r_matrices(c: &mut Criterion) {
    let mut g = c.benchmark_group("r_m");
    g.sample_size(10);
    for (name, m) in [("B2", 5), ("A3", 3), ("B3", -3)] {
        let datum = Arc::new(builtin(name).unwrap());
        g.bench_function(format!("{name}/m={m}"), |b| {
            b.iter(|| MatrixFamily::new(datum.clone()).unwrap().r(m).unwrap())
        });
    }
    g.finish();
}

fn decomposition(c: &mut Criterion) {
    let f = family("B2");
    let scope = Scope { ambient: f.ambient(), invariants: f.datum().invariants() };
    let Value::Form(coeffs) = scope.eval(&parse("(x^4+y^4)*(dx/x + dy/y)").unwrap()).unwrap() else {
        unreachable!()
    };
    let w = LogForm::new(coeffs);
    let mut g = c.benchmark_group("decompose");
    g.sample_size(20);
    g.bench_function("b2_example", |b| b.iter(|| decompose_form(&f, &w).unwrap()));
    g.finish();
}

criterion_group!(benches, poly_mul, det, r_matrices, decomposition);
criterion_main!(benches);
