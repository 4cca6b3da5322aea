use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dnnreuse::measure::{energy_efficiency, load_measurements};
use dnnreuse::model::{load_model, ShapedGraph};
use dnnreuse::profile::{aggregate_many, layer_costs, read_profiles};
use dnnreuse::stats::alpha_sweep;
use dnnreuse::{Exec, Reuse};

const SCHEDULES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn fixtures() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"))
}

fn models() -> Vec<ShapedGraph> {
    let mut paths: Vec<_> = std::fs::read_dir(fixtures().join("models"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| load_model(&std::fs::read_to_string(p).unwrap()).unwrap())
        .collect()
}

fn calibration_inputs() -> (Vec<Reuse>, Vec<f64>) {
    let profiles = read_profiles(std::fs::File::open(fixtures().join("profiles_table.csv")).unwrap()).unwrap();
    let runs = load_measurements(std::fs::File::open(fixtures().join("measurements.csv")).unwrap()).unwrap();
    runs.iter()
        .filter(|r| r.device == "P4000" && r.batch == 4)
        .map(|r| {
            let p = profiles.iter().find(|p| p.model == r.model).unwrap();
            (p.profile().reuse().unwrap(), energy_efficiency(r).unwrap())
        })
        .unzip()
}

fn bench(c: &mut Criterion) {
    let graphs = models();
    let mut group = c.benchmark_group("aggregate_many");
    for (name, exec) in SCHEDULES {
        group.bench_function(name, |b| b.iter(|| aggregate_many(black_box(&graphs), exec)));
    }
    group.finish();

    let densenet = graphs
        .iter()
        .max_by_key(|g| g.graph().len())
        .expect("bundled models");
    let mut group = c.benchmark_group("layer_costs");
    for (name, exec) in SCHEDULES {
        group.bench_function(name, |b| b.iter(|| layer_costs(black_box(densenet), exec).unwrap()));
    }
    group.finish();

    let (reuses, eff) = calibration_inputs();
    let mut group = c.benchmark_group("alpha_sweep");
    for step in [0.05, 0.001] {
        for (name, exec) in SCHEDULES {
            group.bench_with_input(BenchmarkId::new(name, step), &step, |b, &step| {
                b.iter(|| alpha_sweep(black_box(&reuses), black_box(&eff), step, 0.005, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
