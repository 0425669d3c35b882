use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::Rng;

use radiocast_core::adversary::{random_spanning_tree, StrongDualGraph};
use radiocast_core::rlnc::{CodedPacket, Field, SpanState};
use radiocast_core::sf::{HarmonicParams, Setting, SingleBroadcast};
use radiocast_core::{resolve_round, run, seeded_rng, RunOptions, StableSubgraph, TransmitIntent};

fn reception(c: &mut Criterion) {
    let n = 256;
    let mut rng = seeded_rng(1, "bench");
    let mut g = random_spanning_tree(n, &mut rng);
    for _ in 0..4 * n {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if u != v {
            g.add_edge(u, v).unwrap();
        }
    }
    let intents = TransmitIntent(
        (0..n)
            .map(|v| rng.random_bool(0.05).then_some(v as u32))
            .collect(),
    );
    c.bench_function("resolve_round n=256", |b| {
        b.iter(|| resolve_round(black_box(&g), black_box(&intents)).unwrap())
    });
}

fn span(c: &mut Criterion) {
    let f = Field::new(257).unwrap();
    let s = 32;
    let mut rng = seeded_rng(2, "bench");
    let packets: Vec<CodedPacket> = (0..s)
        .map(|_| CodedPacket {
            mu: (0..s).map(|_| rng.random_range(0..257)).collect(),
            m: (0..s).map(|_| rng.random_range(0..257)).collect(),
        })
        .collect();
    c.bench_function("span_insert to full rank s=32", |b| {
        b.iter_batched(
            || SpanState::new(f, s, s),
            |mut sp| {
                for p in &packets {
                    sp.insert(p).unwrap();
                }
                sp
            },
            BatchSize::SmallInput,
        )
    });
}

fn harmonic(c: &mut Criterion) {
    let n = 64;
    let setting = Setting::Harmonic(HarmonicParams::default());
    let mut seed = 0;
    c.bench_function("harmonic 32-limited run n=64 ring", |b| {
        b.iter(|| {
            seed += 1;
            let mut p = SingleBroadcast::limited(n, &setting, &[0], 32).unwrap();
            let mut adv = StrongDualGraph::new(StableSubgraph::ring(n));
            run(&mut p, &mut adv, &RunOptions::new(seed, u64::MAX))
                .unwrap()
                .rounds
        })
    });
}

criterion_group!(benches, reception, span, harmonic);
criterion_main!(benches);
