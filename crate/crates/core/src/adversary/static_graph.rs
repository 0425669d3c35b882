use std::sync::Arc;

use super::AdversaryPolicy;
use crate::engine::HistoryView;
use crate::graph::RoundGraph;
use crate::primitives::Horizon;

/// Emits the same graph every round.
#[derive(Clone, Debug)]
pub struct StaticAdversary {
    graph: Arc<RoundGraph>,
    tau: Horizon,
}

impl StaticAdversary {
    pub fn new(graph: RoundGraph) -> Self {
        StaticAdversary {
            graph: Arc::new(graph),
            tau: Horizon::Infinite,
        }
    }

    /// Same schedule, but declared with a different obliviousness.
    pub fn with_tau(mut self, tau: Horizon) -> Self {
        self.tau = tau;
        self
    }
}

impl<M> AdversaryPolicy<M> for StaticAdversary {
    fn name(&self) -> &'static str {
        "static"
    }
    fn tau(&self) -> Horizon {
        self.tau
    }
    fn promise(&self) -> Horizon {
        Horizon::Infinite
    }
    fn next_graph(&mut self, _view: &HistoryView<'_, M>) -> Arc<RoundGraph> {
        Arc::clone(&self.graph)
    }
}
