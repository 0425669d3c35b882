//! Adversaries choosing the per-round communication graph.
//!
//! An adversary is `tau`-oblivious: for round `r` it may inspect the
//! algorithm's random choices of rounds `<= r - tau` only. The engine hands
//! it a [`HistoryView`] that refuses (and logs) anything outside that window,
//! and independently checks the promised interval connectivity `T` over the
//! emitted schedule.

mod dualgraph;
mod isolating;
mod random_connected;
mod static_graph;
mod target;
mod tree;

use std::sync::Arc;

pub use dualgraph::StrongDualGraph;
pub use isolating::IsolatingTree;
pub use random_connected::RandomConnected;
pub use static_graph::StaticAdversary;
pub use target::TargetNetwork;
pub use tree::random_spanning_tree;

use crate::engine::HistoryView;
use crate::error::{domain, Result};
use crate::graph::RoundGraph;
use crate::primitives::Horizon;

pub trait AdversaryPolicy<M> {
    fn name(&self) -> &'static str;

    /// Obliviousness: rounds of randomness hidden from the adversary.
    fn tau(&self) -> Horizon;

    /// Interval-connectivity promise `T` of every emitted schedule.
    fn promise(&self) -> Horizon;

    /// How many past rounds the engine must retain for this adversary.
    fn lookback(&self) -> usize {
        0
    }

    fn next_graph(&mut self, view: &HistoryView<'_, M>) -> Arc<RoundGraph>;
}

impl<M, A: AdversaryPolicy<M> + ?Sized> AdversaryPolicy<M> for Box<A> {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn tau(&self) -> Horizon {
        (**self).tau()
    }
    fn promise(&self) -> Horizon {
        (**self).promise()
    }
    fn lookback(&self) -> usize {
        (**self).lookback()
    }
    fn next_graph(&mut self, view: &HistoryView<'_, M>) -> Arc<RoundGraph> {
        (**self).next_graph(view)
    }
}

/// Names accepted by the harness.
pub const ADVERSARY_NAMES: &[&str] = &[
    "static",
    "dualgraph-strong",
    "target-network",
    "random-connected",
    "isolating-tree",
];

/// Connected spanning subgraph present in every round of an
/// infinite-interval-connected schedule.
#[derive(Clone, Debug)]
pub struct StableSubgraph {
    graph: Arc<RoundGraph>,
    max_degree: usize,
}

impl StableSubgraph {
    pub fn new(graph: RoundGraph) -> Result<Self> {
        if !graph.is_connected() {
            return Err(domain("stable subgraph must be connected"));
        }
        let max_degree = graph.max_degree();
        Ok(StableSubgraph {
            graph: Arc::new(graph),
            max_degree,
        })
    }

    pub fn ring(n: usize) -> Self {
        StableSubgraph::new(RoundGraph::ring(n)).expect("rings are connected")
    }

    pub fn graph(&self) -> &Arc<RoundGraph> {
        &self.graph
    }

    /// Maximum degree, the `Delta` of the learning-event bound.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_subgraph_must_be_connected() {
        assert!(StableSubgraph::new(RoundGraph::empty(3)).is_err());
        let ring = StableSubgraph::ring(8);
        assert_eq!(ring.max_degree(), 2);
    }
}
