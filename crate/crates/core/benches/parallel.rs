use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use seqcorr::lattice::{map_to_spatiotemporal, run_slice_program_with, LatticeSpec, Order};
use seqcorr::mbqc::{compile_pattern, run_exact, Circuit, Gate};
use seqcorr::mps::ghz_mps;
use seqcorr::numerics::gates;
use seqcorr::random::{random_setting, random_state};
use seqcorr::spatial::correlation_sweep;
use seqcorr::temporal::map_mps_to_chain;
use seqcorr::Exec;

fn modes() -> Vec<(&'static str, Exec)> {
    let mut v = vec![("sequential", Exec::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Exec::Parallel));
    v
}

fn chain(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mps = ghz_mps(12).unwrap();
    let settings: Vec<_> = (0..12).map(|_| random_setting(&mut rng)).collect();
    let chain = map_mps_to_chain(&mps, &settings).unwrap();
    let mut group = c.benchmark_group("run_chain_ghz12");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| chain.run_with(exec).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let psi = random_state(&mut rng, 1 << 10);
    let lists: Vec<Vec<_>> = (0..64)
        .map(|_| (0..10).map(|_| random_setting(&mut rng)).collect())
        .collect();
    let mut group = c.benchmark_group("spatial_sweep_64x10");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| correlation_sweep(&psi, &lists, exec).unwrap())
        });
    }
    group.finish();
}

fn lattice(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spec = LatticeSpec::cluster(3, 4, Order::Second).unwrap();
    let grid: Vec<Vec<_>> = (0..4)
        .map(|_| (0..3).map(|_| random_setting(&mut rng)).collect())
        .collect();
    let program = map_to_spatiotemporal(&spec, &grid).unwrap();
    let mut group = c.benchmark_group("slice_program_3x4");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_slice_program_with(&program, exec).unwrap())
        });
    }
    group.finish();
}

fn mbqc(c: &mut Criterion) {
    let circuit = Circuit::new(2, vec![Gate::rz(0, 0.4), Gate::cz(0, 1), Gate::rz(1, 0.2)]).unwrap();
    let pattern = compile_pattern(&circuit).unwrap();
    let input = gates::ket(4, 0);
    let mut group = c.benchmark_group("mbqc_exact");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_exact(&pattern, &input, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    name = benches;
    config = Criterion::default().sample_size(10).configure_from_args();
    targets = chain, sweep, lattice, mbqc
);
criterion_main!(benches);
