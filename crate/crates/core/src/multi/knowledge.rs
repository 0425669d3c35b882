use crate::bitset::NodeSet;
use crate::primitives::{MsgId, NodeId};

const NEVER: u64 = u64::MAX;

/// Which node knows which broadcast message, and since when.
#[derive(Clone, Debug)]
pub struct Knowledge {
    n: usize,
    s: usize,
    known: Vec<NodeSet>,
    holders: Vec<u32>,
    first_round: Vec<u64>,
    pairs: u64,
    complete_nodes: usize,
}

impl Knowledge {
    /// Message `i` is known by `sources[i]` from round 0.
    pub fn with_sources(n: usize, sources: &[NodeId]) -> Self {
        let s = sources.len();
        let mut k = Knowledge {
            n,
            s,
            known: vec![NodeSet::new(s); n],
            holders: vec![0; s],
            first_round: vec![NEVER; n * s],
            pairs: 0,
            complete_nodes: 0,
        };
        for (i, v) in sources.iter().enumerate() {
            k.learn(v.index(), i as MsgId, 0);
        }
        k
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn message_count(&self) -> usize {
        self.s
    }

    /// Records that `v` knows `id` as of `round`; true if it is new.
    pub fn learn(&mut self, v: usize, id: MsgId, round: u64) -> bool {
        if !self.known[v].insert(id as usize) {
            return false;
        }
        self.holders[id as usize] += 1;
        self.first_round[v * self.s + id as usize] = round;
        self.pairs += 1;
        if self.known[v].is_full() {
            self.complete_nodes += 1;
        }
        true
    }

    pub fn knows(&self, v: usize, id: MsgId) -> bool {
        self.known[v].contains(id as usize)
    }

    pub fn known(&self, v: usize) -> &NodeSet {
        &self.known[v]
    }

    pub fn holders(&self, id: MsgId) -> u32 {
        self.holders[id as usize]
    }

    pub fn known_by_all(&self, id: MsgId) -> bool {
        self.holders[id as usize] as usize == self.n
    }

    pub fn min_multiplicity(&self) -> u32 {
        self.holders.iter().copied().min().unwrap_or(0)
    }

    pub fn is_complete(&self) -> bool {
        self.complete_nodes == self.n
    }

    /// Known `(node, message)` pairs.
    pub fn pairs(&self) -> u64 {
        self.pairs
    }

    /// Round in which `v` first knew `id`.
    pub fn first_round(&self, v: usize, id: MsgId) -> Option<u64> {
        let r = self.first_round[v * self.s + id as usize];
        (r != NEVER).then_some(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bookkeeping() {
        let mut k = Knowledge::with_sources(3, &[NodeId(0), NodeId(0)]);
        assert_eq!(k.pairs(), 2);
        assert_eq!(k.min_multiplicity(), 1);
        assert!(k.learn(1, 1, 5));
        assert!(!k.learn(1, 1, 6));
        assert_eq!(k.first_round(1, 1), Some(5));
        assert_eq!(k.first_round(2, 1), None);
        for v in 1..3 {
            k.learn(v, 0, 7);
        }
        k.learn(2, 1, 8);
        assert!(k.is_complete());
        assert!(k.known_by_all(0));
    }
}
