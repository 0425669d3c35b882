use std::sync::Arc;

use super::{AdversaryPolicy, StableSubgraph};
use crate::engine::HistoryView;
use crate::graph::RoundGraph;
use crate::primitives::Horizon;

/// The 0-oblivious dual-graph adversary: whenever two or more nodes
/// transmit, every pair is connected so they all collide everywhere; otherwise
/// only the stable subgraph is present and a lone transmitter reaches at most
/// `max_degree` nodes.
#[derive(Clone, Debug)]
pub struct StrongDualGraph {
    stable: StableSubgraph,
    complete: Arc<RoundGraph>,
}

impl StrongDualGraph {
    pub fn new(stable: StableSubgraph) -> Self {
        let complete = Arc::new(RoundGraph::complete(stable.node_count()));
        StrongDualGraph { stable, complete }
    }

    pub fn stable(&self) -> &StableSubgraph {
        &self.stable
    }
}

impl<M> AdversaryPolicy<M> for StrongDualGraph {
    fn name(&self) -> &'static str {
        "dualgraph-strong"
    }
    fn tau(&self) -> Horizon {
        Horizon::Finite(0)
    }
    fn promise(&self) -> Horizon {
        Horizon::Infinite
    }
    fn next_graph(&mut self, view: &HistoryView<'_, M>) -> Arc<RoundGraph> {
        let transmitters = view
            .current_intents()
            .map_or(0, |i| i.iter().filter(|m| m.is_some()).count());
        if transmitters >= 2 {
            Arc::clone(&self.complete)
        } else {
            Arc::clone(self.stable.graph())
        }
    }
}
