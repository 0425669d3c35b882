use rand::seq::IndexedRandom;

use super::HittingGame;
use crate::adversary::TargetNetwork;
use crate::error::{config, Result};
use crate::graph::RoundGraph;
use crate::primitives::NodeId;
use crate::rng::{labels, seeded_rng};

/// The public part of an `s`-clique-star: which nodes are external, which
/// form the clique, and where the broadcast messages start. Bridges are not
/// part of it.
#[derive(Clone, Debug, PartialEq)]
pub struct StarLayout {
    n: usize,
    externals: Vec<NodeId>,
    clique: Vec<NodeId>,
    placement: Vec<NodeId>,
}

impl StarLayout {
    /// Externals take the IDs of `B` (message `i` belongs to the external
    /// with the `i`-th smallest ID), the clique takes `A`, and the messages
    /// start on distinct, uniformly chosen clique nodes.
    pub fn new(game: &HittingGame, n: usize, s: usize, seed: u64) -> Result<Self> {
        if game.alpha() as usize != n.wrapping_sub(s) || game.beta() as usize != s {
            return Err(config(format!(
                "hitting game ({}, {}) does not match n - s = {}, s = {s}",
                game.alpha(),
                game.beta(),
                n.wrapping_sub(s)
            )));
        }
        let mut b = game.b().to_vec();
        b.sort_unstable();
        let externals: Vec<NodeId> = b.into_iter().map(NodeId::from_label).collect();
        let clique: Vec<NodeId> = game.a().iter().copied().map(NodeId::from_label).collect();
        let mut rng = seeded_rng(seed, labels::PLACEMENT);
        let placement = clique.choose_multiple(&mut rng, s).copied().collect();
        Ok(StarLayout {
            n,
            externals,
            clique,
            placement,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn message_count(&self) -> usize {
        self.externals.len()
    }

    pub fn external(&self, i: usize) -> NodeId {
        self.externals[i]
    }

    pub fn externals(&self) -> &[NodeId] {
        &self.externals
    }

    pub fn clique(&self) -> &[NodeId] {
        &self.clique
    }

    /// Source of message `i`.
    pub fn source(&self, i: usize) -> NodeId {
        self.placement[i]
    }

    pub fn sources(&self) -> &[NodeId] {
        &self.placement
    }

    pub fn is_external(&self, v: NodeId) -> bool {
        self.externals.contains(&v)
    }
}

/// A fully instantiated clique-star: external `e_i` hangs off bridge `a_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CliqueStar {
    layout: StarLayout,
    bridges: Vec<NodeId>,
}

impl CliqueStar {
    pub fn new(layout: StarLayout, bridge_labels: &[u32]) -> Result<Self> {
        if bridge_labels.len() != layout.message_count() {
            return Err(config("one bridge per external is required"));
        }
        let bridges: Vec<NodeId> = bridge_labels
            .iter()
            .copied()
            .map(NodeId::from_label)
            .collect();
        if bridges.iter().any(|b| !layout.clique.contains(b)) {
            return Err(config("bridges must be clique nodes"));
        }
        Ok(CliqueStar { layout, bridges })
    }

    pub fn layout(&self) -> &StarLayout {
        &self.layout
    }

    pub fn node_count(&self) -> usize {
        self.layout.n
    }

    pub fn external(&self, i: usize) -> NodeId {
        self.layout.external(i)
    }

    pub fn bridge_of(&self, i: usize) -> NodeId {
        self.bridges[i]
    }

    /// Number of distinct bridge nodes, `j <= s`.
    pub fn bridge_count(&self) -> usize {
        let mut b = self.bridges.clone();
        b.sort_unstable();
        b.dedup();
        b.len()
    }

    /// The static clique-star graph itself.
    pub fn graph(&self) -> RoundGraph {
        let mut g = RoundGraph::empty(self.layout.n);
        let c = &self.layout.clique;
        for (i, u) in c.iter().enumerate() {
            for v in &c[i + 1..] {
                g.insert_unchecked(u.index(), v.index());
            }
        }
        for (i, e) in self.layout.externals.iter().enumerate() {
            g.insert_unchecked(e.index(), self.bridges[i].index());
        }
        g
    }
}

/// Ground-truth instantiation of the target network for `game`. Reads the
/// secret targets; only the verification side may call this.
pub fn build_target_network(
    game: &HittingGame,
    n: usize,
    s: usize,
    seed: u64,
) -> Result<(CliqueStar, TargetNetwork)> {
    let layout = StarLayout::new(game, n, s, seed)?;
    let star = CliqueStar::new(layout, &game.reveal_targets())?;
    let adversary = TargetNetwork::new(star.clone());
    Ok((star, adversary))
}
