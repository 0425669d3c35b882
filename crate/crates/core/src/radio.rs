//! The radio reception rule.
//!
//! A listening node receives a message iff exactly one of its neighbours in
//! the round graph transmits. Zero or several transmitting neighbours both
//! produce silence: there is no collision detection. Transmitters are
//! half-duplex and hear silence themselves.

use std::fmt;

use crate::bitset::{self, NodeSet};
use crate::error::{Error, Result};
use crate::graph::RoundGraph;
use crate::primitives::{MsgId, NodeId};

/// Anything a node can put on the channel.
pub trait WireMessage: Clone + fmt::Debug {
    /// Broadcast messages carried verbatim (store-and-forward payload).
    /// Control traffic and coded packets return an empty slice.
    fn broadcast_ids(&self) -> &[MsgId];

    /// Broadcast messages charged against the communication capacity.
    fn load(&self) -> usize {
        self.broadcast_ids().len()
    }
}

/// Per-node transmit decisions for one round; `None` means listen.
#[derive(Clone, Debug, PartialEq)]
pub struct TransmitIntent<M>(pub Vec<Option<M>>);

impl<M> TransmitIntent<M> {
    pub fn silent(n: usize) -> Self {
        TransmitIntent((0..n).map(|_| None).collect())
    }

    pub fn node_count(&self) -> usize {
        self.0.len()
    }

    pub fn transmitters(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_some())
            .map(|(i, _)| NodeId::from(i))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Delivery<M> {
    Received { message: M, from: NodeId },
    Silence,
}

impl<M> Delivery<M> {
    pub fn is_silence(&self) -> bool {
        matches!(self, Delivery::Silence)
    }
}

/// What every node heard in one round.
#[derive(Clone, Debug, PartialEq)]
pub struct Reception<M>(pub Vec<Delivery<M>>);

impl<M> Reception<M> {
    pub fn get(&self, v: NodeId) -> &Delivery<M> {
        &self.0[v.index()]
    }
}

/// Applies the reception rule.
pub fn resolve_round<M: Clone>(
    graph: &RoundGraph,
    intents: &TransmitIntent<M>,
) -> Result<Reception<M>> {
    let n = graph.node_count();
    if intents.node_count() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: intents.node_count(),
        });
    }
    let tx = transmitter_set(&intents.0);
    let mut senders = vec![None; n];
    resolve_senders(graph, &tx, &mut senders);
    Ok(Heard::new(&intents.0, &senders).to_reception())
}

pub(crate) fn transmitter_set<M>(intents: &[Option<M>]) -> NodeSet {
    NodeSet::from_indices(
        intents.len(),
        intents
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_some())
            .map(|(i, _)| i),
    )
}

/// Hot-path form of [`resolve_round`]: fills `senders[u]` with the unique
/// transmitting neighbour of `u`, if there is one.
pub fn resolve_senders(graph: &RoundGraph, transmitters: &NodeSet, senders: &mut [Option<NodeId>]) {
    let tx = transmitters.words();
    for (u, slot) in senders.iter_mut().enumerate().take(graph.node_count()) {
        *slot = None;
        if bitset::test_bit(tx, u) {
            continue;
        }
        let (count, last) = bitset::and_count_capped(graph.row(u), tx, 1);
        if count == 1 {
            *slot = Some(NodeId::from(last));
        }
    }
}

/// Borrowed view of one resolved round: the intents plus, per node, the
/// unique sender it heard.
#[derive(Clone, Copy)]
pub struct Heard<'a, M> {
    intents: &'a [Option<M>],
    senders: &'a [Option<NodeId>],
}

impl<'a, M> Heard<'a, M> {
    pub fn new(intents: &'a [Option<M>], senders: &'a [Option<NodeId>]) -> Self {
        debug_assert_eq!(intents.len(), senders.len());
        Heard { intents, senders }
    }

    #[inline]
    pub fn get(&self, v: usize) -> Option<(NodeId, &'a M)> {
        let from = self.senders[v]?;
        let msg = self.intents[from.index()]
            .as_ref()
            .expect("sender must have transmitted");
        Some((from, msg))
    }

    /// `(receiver, sender, message)` for every successful reception.
    pub fn iter(&self) -> impl Iterator<Item = (usize, NodeId, &'a M)> + '_ {
        (0..self.senders.len()).filter_map(move |v| self.get(v).map(|(f, m)| (v, f, m)))
    }

    pub fn intents(&self) -> &'a [Option<M>] {
        self.intents
    }

    pub fn senders(&self) -> &'a [Option<NodeId>] {
        self.senders
    }
}

impl<M: Clone> Heard<'_, M> {
    pub fn to_reception(&self) -> Reception<M> {
        Reception(
            (0..self.senders.len())
                .map(|v| match self.get(v) {
                    Some((from, m)) => Delivery::Received {
                        message: m.clone(),
                        from,
                    },
                    None => Delivery::Silence,
                })
                .collect(),
        )
    }
}
