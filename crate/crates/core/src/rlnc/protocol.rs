use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CodedPacket, Decoded, Field, SpanState};
use crate::engine::{Protocol, Step};
use crate::error::{config, Result};
use crate::multi::check_sources;
use crate::primitives::{MsgId, NodeId};
use crate::radio::{Heard, WireMessage};
use crate::rng::{labels, seeded_rng, SimRng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RlncParams {
    /// Field order; must be prime.
    pub q: u32,
    /// Payload length; `None` means `s`.
    pub payload_len: Option<usize>,
    /// Round budget is `budget_factor * n * (n + s)`.
    pub budget_factor: u64,
    /// Check every transmitted packet against the ground truth.
    pub verify: bool,
}

impl Default for RlncParams {
    fn default() -> Self {
        RlncParams {
            q: 257,
            payload_len: None,
            budget_factor: 4,
            verify: true,
        }
    }
}

/// A change of one node's rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RankEvent {
    pub round: u64,
    pub node: usize,
    pub rank: usize,
    pub decoded: bool,
}

impl WireMessage for CodedPacket {
    fn broadcast_ids(&self) -> &[MsgId] {
        &[]
    }

    /// Coefficient headers are free: one coded packet fills one slot.
    fn load(&self) -> usize {
        1
    }
}

/// Network-coded broadcast: every round each node sends, with probability
/// `1/n`, a uniformly random element of its span.
#[derive(Clone, Debug)]
pub struct RlncBroadcast {
    field: Field,
    n: usize,
    s: usize,
    budget: u64,
    verify: bool,
    messages: Vec<Vec<u32>>,
    spans: Vec<SpanState>,
    decode_round: Vec<Option<u64>>,
    decoded_count: usize,
    trajectory: Vec<RankEvent>,
    probes: Vec<(Vec<u32>, Vec<usize>)>,
    violations: Vec<String>,
}

impl RlncBroadcast {
    /// Message `i` starts at node `sources[i]`; payloads are drawn from the
    /// ground-truth stream of `seed`.
    pub fn new(n: usize, sources: &[NodeId], params: &RlncParams, seed: u64) -> Result<Self> {
        let s = sources.len();
        check_sources(n, s, sources)?;
        if params.budget_factor == 0 {
            return Err(config("budget_factor must be positive"));
        }
        let field = Field::new(params.q)?;
        let l = params.payload_len.unwrap_or(s);
        if l == 0 {
            return Err(config("payload length must be positive"));
        }
        let mut rng = seeded_rng(seed, labels::GROUND_TRUTH);
        let messages: Vec<Vec<u32>> = (0..s)
            .map(|_| (0..l).map(|_| rng.random_range(0..field.order())).collect())
            .collect();
        let mut me = RlncBroadcast {
            field,
            n,
            s,
            budget: params.budget_factor * (n as u64) * (n + s) as u64,
            verify: params.verify,
            messages,
            spans: vec![SpanState::new(field, s, l); n],
            decode_round: vec![None; n],
            decoded_count: 0,
            trajectory: Vec::new(),
            probes: Vec::new(),
            violations: Vec::new(),
        };
        for (i, v) in sources.iter().enumerate() {
            let pkt = CodedPacket::unit(s, i, me.messages[i].clone());
            me.absorb(0, v.index(), &pkt);
        }
        Ok(me)
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn messages(&self) -> &[Vec<u32>] {
        &self.messages
    }

    pub fn span(&self, v: usize) -> &SpanState {
        &self.spans[v]
    }

    pub fn decode_rounds(&self) -> &[Option<u64>] {
        &self.decode_round
    }

    /// Round at which the last node decoded.
    pub fn completed_at(&self) -> Option<u64> {
        if self.decoded_count == self.n {
            self.decode_round.iter().flatten().max().copied()
        } else {
            None
        }
    }

    /// Rank changes in order, starting with the sources' initial packets at
    /// round 0.
    pub fn trajectory(&self) -> &[RankEvent] {
        &self.trajectory
    }

    /// Soundness or decoding failures seen in verify mode.
    pub fn violations(&self) -> &[String] {
        &self.violations
    }

    /// Starts recording how many nodes know about `mu` after every round.
    pub fn track(&mut self, mu: Vec<u32>) -> Result<usize> {
        if mu.len() != self.s {
            return Err(crate::error::Error::DimensionMismatch {
                expected: self.s,
                found: mu.len(),
            });
        }
        let now = self.spans.iter().filter(|sp| sp.knows_about(&mu)).count();
        self.probes.push((mu, vec![now]));
        Ok(self.probes.len() - 1)
    }

    /// Knower counts of probe `i`: entry 0 is the state when tracking began,
    /// entry `j` the state after the `j`-th subsequent round.
    pub fn spread(&self, i: usize) -> &[usize] {
        &self.probes[i].1
    }

    fn absorb(&mut self, round: u64, v: usize, pkt: &CodedPacket) {
        let before = self.spans[v].rank();
        let grew = self.spans[v]
            .insert(pkt)
            .expect("packet dimensions are fixed per run");
        if !grew {
            return;
        }
        let rank = self.spans[v].rank();
        if self.verify && rank <= before {
            self.violations.push(format!(
                "round {round}: rank of node {v} fell from {before} to {rank}"
            ));
        }
        let decoded = rank == self.s;
        if decoded {
            self.decode_round[v] = Some(round);
            self.decoded_count += 1;
            if self.verify && self.spans[v].decode() != Decoded::Messages(self.messages.clone()) {
                self.violations
                    .push(format!("round {round}: node {v} decoded wrong messages"));
            }
        }
        self.trajectory.push(RankEvent {
            round,
            node: v,
            rank,
            decoded,
        });
    }
}

impl Protocol for RlncBroadcast {
    type Msg = CodedPacket;

    fn node_count(&self) -> usize {
        self.n
    }

    fn transmit(&mut self, round: u64, rng: &mut SimRng, out: &mut [Option<CodedPacket>]) -> Step {
        for (v, slot) in out.iter_mut().enumerate() {
            if rng.random_range(0..self.n) != 0 {
                continue;
            }
            let pkt = self.spans[v].sample(rng);
            if self.verify && !pkt.is_consistent(self.field, &self.messages) {
                self.violations.push(format!(
                    "round {round}: node {v} sent an inconsistent packet"
                ));
            }
            *slot = Some(pkt);
        }
        Step::Transmit
    }

    fn receive(&mut self, round: u64, heard: &Heard<'_, CodedPacket>) {
        for (v, _, pkt) in heard.iter() {
            self.absorb(round, v, pkt);
        }
        for (mu, counts) in &mut self.probes {
            counts.push(self.spans.iter().filter(|sp| sp.knows_about(mu)).count());
        }
    }

    fn is_finished(&self) -> bool {
        self.decoded_count == self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{RandomConnected, StaticAdversary};
    use crate::engine::{run, RunOptions};
    use crate::graph::RoundGraph;
    use crate::multi::default_sources;
    use crate::primitives::Horizon;

    #[test]
    fn single_link_decodes() {
        let mut p =
            RlncBroadcast::new(2, &default_sources(2, 1), &RlncParams::default(), 3).unwrap();
        let mut adv = StaticAdversary::new(RoundGraph::complete(2));
        let opts = RunOptions::new(3, p.budget());
        let out = run(&mut p, &mut adv, &opts).unwrap();
        assert!(out.finished);
        assert!(p.violations().is_empty());
        assert_eq!(p.completed_at(), Some(out.rounds));
    }

    #[test]
    fn decodes_under_fresh_trees() {
        let n = 12;
        let mut p =
            RlncBroadcast::new(n, &default_sources(n, 5), &RlncParams::default(), 8).unwrap();
        let mut adv = RandomConnected::new(n, Horizon::Finite(1), 0.0, 8).unwrap();
        let opts = RunOptions::new(8, p.budget());
        let out = run(&mut p, &mut adv, &opts).unwrap();
        assert!(out.finished);
        assert!(out.audit.is_clean());
        assert!(p.violations().is_empty());
        for v in 0..n {
            assert_eq!(p.span(v).decode(), Decoded::Messages(p.messages().to_vec()));
        }
        // Ranks never drop along each node's trajectory.
        let mut last = vec![0; n];
        for e in p.trajectory() {
            assert!(e.rank > last[e.node]);
            last[e.node] = e.rank;
        }
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let src = default_sources(4, 2);
        let p = RlncParams {
            q: 12,
            ..RlncParams::default()
        };
        assert!(RlncBroadcast::new(4, &src, &p, 0).is_err());
        let p = RlncParams {
            budget_factor: 0,
            ..RlncParams::default()
        };
        assert!(RlncBroadcast::new(4, &src, &p, 0).is_err());
    }
}
