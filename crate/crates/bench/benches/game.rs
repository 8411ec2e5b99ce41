use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use rumorgame::nash::{enumerate_equilibria, VERIFY_TOL};
use rumorgame::{build_matrix, Actor, ActorState, GlobalParams, Mode, TraitVector};

fn pair() -> (Actor, Actor) {
    let a = Actor::new(ActorState::new(0.5, 0.4, 0.6, 0.5, 0.25).unwrap(), TraitVector::EXPERT);
    let b = Actor::new(ActorState::new(0.1, 0.8, 0.3, 0.2, 0.1).unwrap(), TraitVector::EXPERT);
    (a, b)
}

fn bench_matrix(c: &mut Criterion) {
    let (a, b) = pair();
    let params = GlobalParams::default();
    c.bench_function("build_matrix/duplex", |bch| {
        bch.iter(|| build_matrix(black_box(&a), black_box(&b), &params, Mode::Duplex))
    });
}

fn bench_nash(c: &mut Criterion) {
    let (a, b) = pair();
    let params = GlobalParams::default();
    let duplex = build_matrix(&a, &b, &params, Mode::Duplex);
    let one_way = build_matrix(&a, &b, &params, Mode::OneWay);
    c.bench_function("enumerate_equilibria/4x4", |bch| {
        bch.iter(|| enumerate_equilibria(black_box(&duplex), VERIFY_TOL).unwrap())
    });
    c.bench_function("enumerate_equilibria/2x2", |bch| {
        bch.iter(|| enumerate_equilibria(black_box(&one_way), VERIFY_TOL).unwrap())
    });
}

criterion_group!(benches, bench_matrix, bench_nash);
criterion_main!(benches);
