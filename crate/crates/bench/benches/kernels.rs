use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfcorr::barrier::{logical_barrier, BarrierOptions};
use selfcorr::complex::{CellComplex, CubicSpec};
use selfcorr::decoder::RbhDecoder;
use selfcorr::dynamics::Chain;
use selfcorr::peierls::{enumerate_loops, Sublattice};
use selfcorr::rbh::build_cubic_rbh;
use selfcorr::symmetry::derive_moveset;
use selfcorr::{Bits, Pauli, PauliOperator};

fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliOperator {
    let mut p = PauliOperator::identity(n);
    for q in 0..n {
        p.set(q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)]);
    }
    p
}

fn pauli(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (a, b) = (random_pauli(1000, &mut rng), random_pauli(1000, &mut rng));
    c.bench_function("pauli/multiply_1000", |bch| bch.iter(|| black_box(&a).multiply(black_box(&b)).unwrap()));
    c.bench_function("pauli/commutes_1000", |bch| bch.iter(|| black_box(&a).commutes_unchecked(black_box(&b))));
}

fn model(c: &mut Criterion) {
    let m = build_cubic_rbh(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let e = random_pauli(m.n, &mut rng);
    c.bench_function("model/syndrome_L3", |bch| bch.iter(|| m.syndrome(black_box(&e))));
    c.bench_function("model/build_L3", |bch| bch.iter(|| build_cubic_rbh(3).unwrap()));
}

fn barrier(c: &mut Criterion) {
    let m = build_cubic_rbh(2).unwrap();
    let ms = derive_moveset(&m, 1).unwrap();
    let mut g = c.benchmark_group("barrier");
    g.sample_size(10);
    g.bench_function("symmetric_L2", |bch| bch.iter(|| logical_barrier(&m, &ms, BarrierOptions::default()).unwrap()));
    g.finish();
}

fn dynamics(c: &mut Criterion) {
    let m = build_cubic_rbh(3).unwrap();
    let ms = derive_moveset(&m, 1).unwrap();
    c.bench_function("dynamics/10k_events_L3_beta1.5", |bch| {
        bch.iter_batched(
            || Chain::new(&m, &ms, 1.5, 3).unwrap(),
            |mut chain| {
                chain.run(10_000);
                chain.flips
            },
            BatchSize::SmallInput,
        )
    });
}

fn decoder(c: &mut Criterion) {
    let m = build_cubic_rbh(3).unwrap();
    let ms = derive_moveset(&m, 1).unwrap();
    let dec = RbhDecoder::new(&m).unwrap();
    // a syndrome from two symmetric moves
    let mut s = Bits::zeros(m.num_terms());
    s.xor_assign(&ms.moves[0].delta);
    s.xor_assign(&ms.moves[ms.len() / 2].delta);
    c.bench_function("decoder/two_moves_L3", |bch| bch.iter(|| dec.decode_unchecked(&m, black_box(&s)).unwrap()));
}

fn peierls(c: &mut Criterion) {
    let cx = CellComplex::build(CubicSpec::periodic(4)).unwrap();
    let mut g = c.benchmark_group("peierls");
    g.sample_size(10);
    g.bench_function("dual_k10_L4", |bch| bch.iter(|| enumerate_loops(&cx, Sublattice::Dual, 10)));
    g.finish();
}

criterion_group!(benches, pauli, model, barrier, dynamics, decoder, peierls);
criterion_main!(benches);
