use std::collections::HashMap;
use std::sync::Arc;

use super::AdversaryPolicy;
use crate::engine::HistoryView;
use crate::graph::RoundGraph;
use crate::lower_bound::CliqueStar;
use crate::primitives::Horizon;
use crate::radio::WireMessage;

/// The 0-oblivious adversary on a fully instantiated clique-star:
/// several transmitters get the complete graph; a lone transmitter sending
/// broadcast message `i` gets the complete graph minus the edge to the
/// external `e_i`, unless it is `e_i`'s bridge.
#[derive(Clone, Debug)]
pub struct TargetNetwork {
    star: CliqueStar,
    complete: Arc<RoundGraph>,
    cache: HashMap<Vec<(usize, usize)>, Arc<RoundGraph>>,
}

impl TargetNetwork {
    pub fn new(star: CliqueStar) -> Self {
        let complete = Arc::new(RoundGraph::complete(star.node_count()));
        TargetNetwork {
            star,
            complete,
            cache: HashMap::new(),
        }
    }

    pub fn star(&self) -> &CliqueStar {
        &self.star
    }

    /// The graph for a round whose only transmitter is `sender`, sending `ids`.
    pub fn graph_for_sole(&mut self, sender: usize, ids: &[u32]) -> Arc<RoundGraph> {
        let mut cut: Vec<(usize, usize)> = ids
            .iter()
            .filter_map(|&i| {
                let e = self.star.external(i as usize).index();
                let bridge = self.star.bridge_of(i as usize).index();
                (sender != bridge && sender != e).then_some((sender.min(e), sender.max(e)))
            })
            .collect();
        if cut.is_empty() {
            return Arc::clone(&self.complete);
        }
        cut.sort_unstable();
        cut.dedup();
        let complete = &self.complete;
        Arc::clone(self.cache.entry(cut).or_insert_with_key(|cut| {
            let mut g = (**complete).clone();
            for &(u, v) in cut {
                g.remove_edge(u, v);
            }
            Arc::new(g)
        }))
    }
}

impl<M: WireMessage> AdversaryPolicy<M> for TargetNetwork {
    fn name(&self) -> &'static str {
        "target-network"
    }
    fn tau(&self) -> Horizon {
        Horizon::Finite(0)
    }
    fn promise(&self) -> Horizon {
        Horizon::Finite(1)
    }
    fn next_graph(&mut self, view: &HistoryView<'_, M>) -> Arc<RoundGraph> {
        let Some(intents) = view.current_intents() else {
            return Arc::clone(&self.complete);
        };
        let mut sole = None;
        for (v, m) in intents.iter().enumerate() {
            if let Some(m) = m {
                if sole.is_some() {
                    return Arc::clone(&self.complete);
                }
                sole = Some((v, m));
            }
        }
        match sole {
            Some((v, m)) => self.graph_for_sole(v, m.broadcast_ids()),
            None => Arc::clone(&self.complete),
        }
    }
}
