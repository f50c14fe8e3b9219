use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fairvote_core::{
    exact_committee_distribution, generate_instance, rng_for, softmax_gjcr, GreedyParams,
    InstanceFamily,
};

fn bench_softmax_gjcr_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("softmax_gjcr_sample");
    for &(n, k, m) in &[(12usize, 2usize, 5usize), (36, 3, 5), (60, 3, 8)] {
        let (e, _) = generate_instance(InstanceFamily::Blocks, n, k, Some(m)).unwrap();
        let params = GreedyParams::default();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("n{n}_k{k}_m{m}")),
            &e,
            |b, e| {
                let mut rng = rng_for(0, "bench");
                b.iter(|| softmax_gjcr(e, &params, &mut rng).unwrap());
            },
        );
    }
    group.finish();
}

fn bench_exact_distribution(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_committee_distribution");
    for &(n, k, m) in &[(12usize, 2usize, 5usize), (36, 3, 5)] {
        let (e, _) = generate_instance(InstanceFamily::Blocks, n, k, Some(m)).unwrap();
        let params = GreedyParams::default();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("n{n}_k{k}_m{m}")),
            &e,
            |b, e| b.iter(|| exact_committee_distribution(e, &params).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_softmax_gjcr_sampling, bench_exact_distribution);
criterion_main!(benches);
