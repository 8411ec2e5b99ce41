use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use rumorgame::emergence::{build_regular_graph, run_emergence, EmergenceConfig};
use rumorgame::engine::{PopulationSpec, Simulation};
use rumorgame::TraitVector;

fn bench_steps(c: &mut Criterion) {
    let spec = PopulationSpec {
        n_actors: 100,
        seed: 1,
        ..Default::default()
    };
    c.bench_function("simulation/1000_games_troll", |b| {
        b.iter_batched(
            || Simulation::new(spec.clone()).unwrap(),
            |mut sim| {
                for _ in 0..1000 {
                    sim.step().unwrap();
                }
                sim
            },
            BatchSize::SmallInput,
        )
    });
}

fn bench_graph(c: &mut Criterion) {
    c.bench_function("build_regular_graph/1000x25", |b| {
        b.iter(|| build_regular_graph(1000, 25, 7).unwrap())
    });
    let graph = build_regular_graph(200, 10, 7).unwrap();
    let spec = PopulationSpec {
        n_actors: 200,
        traits: TraitVector::EXPERT,
        seed: 1,
        ..Default::default()
    };
    let config = EmergenceConfig {
        iterations: 1,
        ..Default::default()
    };
    let mut group = c.benchmark_group("emergence");
    group.sample_size(10);
    group.bench_function("200x10_one_round", |b| {
        b.iter(|| run_emergence(&graph, &spec, &config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_steps, bench_graph);
criterion_main!(benches);
