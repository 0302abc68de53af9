use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use squash_core::conditions::{check_reconstruction_conditions, feasible_region_3d, SamplingParams};
use squash_core::squash::alpha_complex_of;
use squash_core::vertical::DualGraph;
use squash_core::{alpha_values, delaunay, sample_manifold, verify_sample, AnalyticManifold, Execution, SampleSpec, Tolerances};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn torus_cloud() -> (AnalyticManifold, squash_core::PointCloud) {
    let m = AnalyticManifold::parse("torus R=3 r=1").unwrap();
    let c = sample_manifold(&SampleSpec { epsilon: 0.25, delta: 0.0, seed: 1, manifold: m.clone() }).unwrap();
    (m, c)
}

fn alpha_filtration(c: &mut Criterion) {
    let (_, cloud) = torus_cloud();
    let d = delaunay(&cloud).unwrap();
    let mut g = c.benchmark_group("alpha_filtration");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| alpha_values(black_box(d.clone()), exec)));
    }
    g.finish();
}

fn sample_verification(c: &mut Criterion) {
    let (m, cloud) = torus_cloud();
    let mut g = c.benchmark_group("sample_verification");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| verify_sample(black_box(&cloud), &m, 0.25, 0.0, exec)));
    }
    g.finish();
}

fn angle_conditions(c: &mut Criterion) {
    let (m, cloud) = torus_cloud();
    let k = alpha_complex_of(&cloud, 0.359, Execution::default()).unwrap();
    let p = SamplingParams::new(0.25, 0.0, 0.359, 1.0).unwrap();
    let mut g = c.benchmark_group("angle_conditions");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| check_reconstruction_conditions(black_box(&k), &m, &p, 4, exec).unwrap())
        });
    }
    g.finish();
}

fn dual_graph(c: &mut Criterion) {
    let (m, cloud) = torus_cloud();
    let k = alpha_complex_of(&cloud, 0.359, Execution::default()).unwrap();
    let tol = Tolerances::default();
    let mut g = c.benchmark_group("dual_graph");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| DualGraph::build(black_box(&k), &m, &tol, exec).unwrap()));
    }
    g.finish();
}

fn region_grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("region_grid");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| feasible_region_3d(black_box(400), 0.6, exec)));
    }
    g.finish();
}

criterion_group!(benches, alpha_filtration, sample_verification, angle_conditions, dual_graph, region_grid);
criterion_main!(benches);
