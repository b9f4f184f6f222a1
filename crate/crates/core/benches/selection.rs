//! Default rayon pool against a single-thread pool on the same workloads.
//! Built without the `parallel` feature both groups run sequentially.

use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gview::harness::bench::build_candidates;
use gview::harness::generate_social_graph;
use gview::selector::gga_with;
use gview::{load_workload, EvalContext, GgaParams};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("pool", rayon::ThreadPoolBuilder::new().build().expect("pool")),
        (
            "single",
            rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool"),
        ),
    ]
}

fn selection(c: &mut Criterion) {
    let workload = load_workload(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../workloads/social.json"))
        .expect("bundled workload");
    let graph = generate_social_graph(150, 10, 20, 7);
    let candidates = build_candidates(&graph, &workload, false);
    let budget = candidates.iter().map(|v| v.size_bytes).sum::<u64>() / 2;
    let params = GgaParams {
        p_f: 0.5,
        p_c: 0.5,
        max_generations: 3,
        ..GgaParams::default()
    };

    let mut group = c.benchmark_group("selection");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("candidates", name), |b| {
            b.iter(|| pool.install(|| black_box(build_candidates(&graph, &workload, false))))
        });
        group.bench_function(BenchmarkId::new("assign", name), |b| {
            b.iter(|| {
                pool.install(|| {
                    let ctx = EvalContext::new(&graph, &workload);
                    black_box(ctx.assign(&candidates).0)
                })
            })
        });
        group.bench_function(BenchmarkId::new("gga", name), |b| {
            b.iter(|| {
                pool.install(|| {
                    let ctx = EvalContext::new(&graph, &workload);
                    black_box(gga_with(&ctx, candidates.clone(), budget, &params).total_benefit)
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, selection);
criterion_main!(benches);
