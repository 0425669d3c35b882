use proptest::prelude::*;

use radiocast_core::adversary::{RandomConnected, StrongDualGraph};
use radiocast_core::multi::{
    coupon_collection_run, default_sources, Algorithm2, Algorithm2Params, CouponState,
};
use radiocast_core::rlnc::{CodedPacket, Decoded, Field, SpanState};
use radiocast_core::sf::{HarmonicParams, Setting};
use radiocast_core::{
    check_interval_connectivity, resolve_round, run, seeded_rng, Delivery, Horizon, RoundGraph,
    RunOptions, StableSubgraph, TransmitIntent,
};

fn graph(n: usize, bits: &[bool]) -> RoundGraph {
    let mut k = 0;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if bits[k % bits.len()] {
                edges.push((u, v));
            }
            k += 1;
        }
    }
    RoundGraph::from_edges(n, edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn receivers_hear_exactly_one_neighbour(
        n in 2usize..12,
        bits in prop::collection::vec(any::<bool>(), 1..66),
        tx in prop::collection::vec(any::<bool>(), 12),
    ) {
        let g = graph(n, &bits);
        let intents = TransmitIntent((0..n).map(|v| tx[v].then_some(v)).collect());
        let rec = resolve_round(&g, &intents).unwrap();
        for u in 0..n {
            let count = (0..n).filter(|&w| tx[w] && g.has_edge(u, w)).count();
            match &rec.0[u] {
                Delivery::Received { message, from } => {
                    prop_assert!(!tx[u] && count == 1);
                    prop_assert!(g.has_edge(u, from.index()) && *message == from.index());
                }
                Delivery::Silence => prop_assert!(tx[u] || count != 1),
            }
        }
    }

    #[test]
    fn interval_connectivity_is_monotone(
        n in 2usize..7,
        rounds in prop::collection::vec(prop::collection::vec(any::<bool>(), 1..22), 1..9),
    ) {
        let schedule: Vec<RoundGraph> = rounds.iter().map(|b| graph(n, b)).collect();
        let mut prev = true;
        for t in 1..=schedule.len() as u64 + 1 {
            let ok = check_interval_connectivity(&schedule, Horizon::Finite(t)).unwrap();
            prop_assert!(!ok || prev);
            prev = ok;
        }
        let inf = check_interval_connectivity(&schedule, Horizon::Infinite).unwrap();
        prop_assert!(!inf || prev);
    }

    #[test]
    fn span_rank_and_soundness(
        seed in any::<u64>(),
        rows in prop::collection::vec(prop::collection::vec(0u32..7, 3), 1..8),
    ) {
        let f = Field::new(7).unwrap();
        let messages = vec![vec![1, 2], vec![3, 4], vec![5, 6]];
        let mut sp = SpanState::new(f, 3, 2);
        let mut rank = 0;
        for mu in rows {
            let mut m = vec![0; 2];
            for (k, msg) in mu.iter().zip(&messages) {
                f.axpy(&mut m, *k, msg);
            }
            let pkt = CodedPacket { mu, m };
            let grew = sp.insert(&pkt).unwrap();
            prop_assert_eq!(grew, sp.rank() == rank + 1);
            prop_assert!(sp.rank() >= rank && sp.rank() <= 3);
            rank = sp.rank();
            let before = sp.clone();
            sp.insert(&pkt).unwrap();
            prop_assert_eq!(&before, &sp);
        }
        let sample = sp.sample(&mut seeded_rng(seed, "p"));
        prop_assert!(sample.is_consistent(f, &messages));
        if sp.rank() == 3 {
            prop_assert_eq!(sp.decode(), Decoded::Messages(messages));
        }
    }

    #[test]
    fn field_inverse_and_distributivity(a in 1u32..257, b in 0u32..257, c in 0u32..257) {
        let f = Field::new(257).unwrap();
        prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(f.sub(b, c), c), b);
    }

    #[test]
    fn more_capacity_never_slows_coupon_collection(seed in any::<u64>(), ell in 1usize..4) {
        let steps: Vec<u64> = [1usize, 2, 5]
            .iter()
            .map(|&c| {
                let st = CouponState::random(8, 12, ell, c, &mut seeded_rng(seed, "place")).unwrap();
                coupon_collection_run(&st, &mut seeded_rng(seed, "steps")).unwrap()
            })
            .collect();
        prop_assert!(steps[0] >= steps[1] && steps[1] >= steps[2]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_connected_keeps_its_promise(seed in any::<u64>(), t in 1u64..6, p in 0.0f64..0.3) {
        let n = 9;
        let mut adv = RandomConnected::new(n, Horizon::Finite(t), p, seed).unwrap();
        let schedule: Vec<RoundGraph> = (1..=40).map(|r| (*adv.graph_at(r)).clone()).collect();
        prop_assert!(check_interval_connectivity(&schedule, Horizon::Finite(t)).unwrap());
    }

    #[test]
    fn algorithm2_delivers_every_message_once(seed in any::<u64>(), s in 1usize..5) {
        let n = 8;
        let setting = Setting::Harmonic(HarmonicParams::default());
        let mut p = Algorithm2::new(n, &default_sources(n, s), &setting, &Algorithm2Params::default()).unwrap();
        let mut adv = StrongDualGraph::new(StableSubgraph::ring(n));
        let out = run(&mut p, &mut adv, &RunOptions::new(seed, u64::MAX).capacity(1)).unwrap();
        prop_assert!(out.audit.is_clean());
        prop_assert!(p.violations().is_empty(), "{:?}", p.violations());
        let delivered = p.phase_log().iter().filter(|r| r.delivered.is_some()).count();
        if p.completed_at().is_some() {
            prop_assert_eq!(delivered, s);
            prop_assert!(p.knowledge().is_complete());
        }
        // Learning is conserved: each pair is learned once.
        prop_assert!(out.stats.learning_events <= (n * s - s) as u64);
    }
}
