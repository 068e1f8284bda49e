use std::hint::black_box;

use coinrep_core::errata::{self, ErrataConfig};
use coinrep_core::exec::Execution;
use coinrep_core::mat4prob;
use coinrep_core::superpose::{self, SweepConfig};
use coinrep_core::suprematism::{self, MaxAreaConfig, Region};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn area_grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("max_area_step_5e-3");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = MaxAreaConfig {
            grid_step: 5e-3,
            exec,
            ..MaxAreaConfig::default()
        };
        for region in [Region::ClassicalCube, Region::QuantumBall] {
            let id = BenchmarkId::new(name, format!("{region:?}"));
            g.bench_with_input(id, &cfg, |b, cfg| b.iter(|| suprematism::max_area(black_box(region), cfg)));
        }
    }
    g.finish();
}

fn weight_sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("weight_convention_2000");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = SweepConfig {
            seed: 0,
            samples: 2000,
            exec,
        };
        g.bench_function(name, |b| b.iter(|| superpose::resolve_weight_convention(black_box(&cfg))));
    }
    g.finish();
}

fn t_sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("t_check_1000");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| mat4prob::t_check(black_box(0), 1000, exec)));
    }
    g.finish();
}

fn errata_run(c: &mut Criterion) {
    let mut g = c.benchmark_group("errata_1000");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = ErrataConfig {
            seed: 0,
            samples: 1000,
            exec,
        };
        g.bench_function(name, |b| b.iter(|| errata::run(black_box(&cfg))));
    }
    g.finish();
}

criterion_group!(benches, area_grid, weight_sweep, t_sweep, errata_run);
criterion_main!(benches);
