use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::tree::add_random_tree;
use super::AdversaryPolicy;
use crate::bitset::NodeSet;
use crate::engine::HistoryView;
use crate::graph::RoundGraph;
use crate::primitives::Horizon;
use crate::rng::{labels, seeded_rng, SimRng};

/// Heuristic 1-oblivious adversary for 1-interval connected experiments.
///
/// A node counts as informed once it has transmitted or received anything.
/// Seeing the previous round's randomness, the adversary draws a fresh random
/// tree on the informed nodes, another on the uninformed ones, and joins them
/// by a single random edge, so progress must squeeze through one link.
/// This is not an optimal adversary.
#[derive(Clone, Debug)]
pub struct IsolatingTree {
    n: usize,
    informed: NodeSet,
    last_round: Option<u64>,
    rng: SimRng,
}

impl IsolatingTree {
    /// `initially_informed` are the sources: the initial message placement is
    /// not algorithm randomness, so the adversary may know it.
    pub fn new(initially_informed: NodeSet, seed: u64) -> Self {
        IsolatingTree {
            n: initially_informed.capacity(),
            informed: initially_informed,
            last_round: None,
            rng: seeded_rng(seed, labels::ADVERSARY),
        }
    }

    pub fn informed(&self) -> &NodeSet {
        &self.informed
    }

    fn build(&mut self) -> RoundGraph {
        let mut g = RoundGraph::empty(self.n);
        let mut inside: Vec<usize> = self.informed.iter().collect();
        let mut outside: Vec<usize> = (0..self.n)
            .filter(|&v| !self.informed.contains(v))
            .collect();
        if inside.is_empty() || outside.is_empty() {
            let all: Vec<usize> = (0..self.n).collect();
            add_random_tree(&mut g, &all, &mut self.rng);
            return g;
        }
        inside.shuffle(&mut self.rng);
        outside.shuffle(&mut self.rng);
        add_random_tree(&mut g, &inside, &mut self.rng);
        add_random_tree(&mut g, &outside, &mut self.rng);
        let a = inside[self.rng.random_range(0..inside.len())];
        let b = outside[self.rng.random_range(0..outside.len())];
        g.insert_unchecked(a, b);
        g
    }
}

impl<M> AdversaryPolicy<M> for IsolatingTree {
    fn name(&self) -> &'static str {
        "isolating-tree"
    }
    fn tau(&self) -> Horizon {
        Horizon::Finite(1)
    }
    fn promise(&self) -> Horizon {
        Horizon::Finite(1)
    }
    fn lookback(&self) -> usize {
        1
    }
    fn next_graph(&mut self, view: &HistoryView<'_, M>) -> Arc<RoundGraph> {
        if let Some(prev) = self.last_round {
            if let Some(rec) = view.record(prev) {
                for (v, m) in rec.intents.iter().enumerate() {
                    if m.is_some() || rec.senders[v].is_some() {
                        self.informed.insert(v);
                    }
                }
            }
        }
        self.last_round = Some(view.round());
        Arc::new(self.build())
    }
}
