use rand::Rng;

use radiocast_core::adversary::RandomConnected;
use radiocast_core::multi::default_sources;
use radiocast_core::rlnc::{CodedPacket, Field, RlncBroadcast, RlncParams, SpanState};
use radiocast_core::{derive_seed, run, seeded_rng, Horizon, RunOptions};

/// While some node does not know about a fixed `mu`, each round adds a new
/// knower with probability at least 1/(2en) under fresh random trees.
#[test]
fn new_learner_rate_under_fresh_trees() {
    let (n, s) = (16, 4);
    let (mut open_rounds, mut progress) = (0u64, 0u64);
    for t in 0..60 {
        let seed = derive_seed(21, &t.to_string());
        let mut p =
            RlncBroadcast::new(n, &default_sources(n, s), &RlncParams::default(), seed).unwrap();
        let mut rng = seeded_rng(seed, "probe");
        let mu: Vec<u32> = loop {
            let v: Vec<u32> = (0..s).map(|_| rng.random_range(0..257)).collect();
            if v.iter().any(|&x| x != 0) {
                break v;
            }
        };
        let probe = p.track(mu).unwrap();
        let mut adv = RandomConnected::new(n, Horizon::Finite(1), 0.0, seed).unwrap();
        let opts = RunOptions::new(seed, p.budget());
        run(&mut p, &mut adv, &opts).unwrap();
        for w in p.spread(probe).windows(2) {
            assert!(w[1] >= w[0], "knowing about a vector is never lost");
            if w[0] < n {
                open_rounds += 1;
                progress += u64::from(w[1] > w[0]);
            }
        }
    }
    let freq = progress as f64 / open_rounds as f64;
    let floor = 0.8 / (2.0 * std::f64::consts::E * n as f64);
    assert!(
        freq >= floor,
        "{progress}/{open_rounds} = {freq:.4} < {floor:.4}"
    );
}

fn random_span(f: Field, s: usize, rank: usize, rng: &mut impl Rng) -> SpanState {
    let mut sp = SpanState::new(f, s, 1);
    while sp.rank() < rank {
        let mu: Vec<u32> = (0..s).map(|_| rng.random_range(0..f.order())).collect();
        sp.insert(&CodedPacket { mu, m: vec![0] }).unwrap();
    }
    sp
}

/// A packet from a sender that knows about `mu` leaves the receiver knowing
/// about `mu` with probability at least 1 - 1/q.
#[test]
fn relay_retention() {
    let s = 4;
    let draws = 10_000;
    for q in [2u32, 257] {
        let f = Field::new(q).unwrap();
        let mut rng = seeded_rng(u64::from(q), "relay");
        let mut kept = 0;
        for _ in 0..draws {
            let mu: Vec<u32> = loop {
                let v: Vec<u32> = (0..s).map(|_| rng.random_range(0..q)).collect();
                if v.iter().any(|&x| x != 0) {
                    break v;
                }
            };
            let sender = loop {
                let rank = rng.random_range(1..=s);
                let sp = random_span(f, s, rank, &mut rng);
                if sp.knows_about(&mu) {
                    break sp;
                }
            };
            let mut receiver = SpanState::new(f, s, 1);
            receiver.insert(&sender.sample(&mut rng)).unwrap();
            kept += u32::from(receiver.knows_about(&mu));
        }
        let p = 1.0 - 1.0 / q as f64;
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        let freq = kept as f64 / draws as f64;
        assert!(
            freq >= p - 3.0 * sigma,
            "q = {q}: {freq:.4} < {:.4}",
            p - 3.0 * sigma
        );
    }
}
