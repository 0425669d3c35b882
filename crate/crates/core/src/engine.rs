//! The synchronous round loop.
//!
//! Each round: the protocol decides who transmits, the adversary picks the
//! round graph through a [`HistoryView`] that enforces its obliviousness, the
//! reception rule resolves the round, and the protocol consumes what every
//! node heard. Runs are strictly sequential and own all of their state.

use std::cell::RefCell;
use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use crate::adversary::AdversaryPolicy;
use crate::bitset::NodeSet;
use crate::error::{Error, Result};
use crate::graph::{IntervalAuditor, RoundGraph};
use crate::primitives::{Horizon, NodeId};
use crate::radio::{resolve_senders, Heard, Reception, WireMessage};
use crate::rng::{labels, seeded_rng, SimRng};

/// Result of a protocol's transmit decision for one round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Intents for this round have been written.
    Transmit,
    /// The protocol stays silent, and its state cannot change, for this many
    /// rounds starting with the current one. It has already advanced its own
    /// clock past them; the engine fast-forwards without consulting the
    /// adversary.
    Idle(u64),
}

/// A distributed algorithm, simulated node by node within one object.
pub trait Protocol {
    type Msg: WireMessage;

    fn node_count(&self) -> usize;

    /// Fills `out` (reset to all-silent by the engine) for 1-based `round`.
    fn transmit(&mut self, round: u64, rng: &mut SimRng, out: &mut [Option<Self::Msg>]) -> Step;

    fn receive(&mut self, round: u64, heard: &Heard<'_, Self::Msg>);

    fn is_finished(&self) -> bool;

    /// Total `(node, broadcast message)` pairs currently known, for
    /// store-and-forward protocols. Drives the learning-event counters.
    fn known_pairs(&self) -> Option<u64> {
        None
    }
}

/// One fully resolved round.
#[derive(Clone, Debug)]
pub struct RoundRecord<M> {
    pub round: u64,
    pub intents: Vec<Option<M>>,
    pub graph: Arc<RoundGraph>,
    pub senders: Vec<Option<NodeId>>,
}

impl<M: Clone> RoundRecord<M> {
    pub fn reception(&self) -> Reception<M> {
        Heard::new(&self.intents, &self.senders).to_reception()
    }

    pub fn transmitter_count(&self) -> usize {
        self.intents.iter().filter(|m| m.is_some()).count()
    }
}

/// Append-only execution trace (kept when tracing is enabled).
#[derive(Clone, Debug)]
pub struct DynamicHistory<M> {
    pub records: Vec<RoundRecord<M>>,
}

impl<M> Default for DynamicHistory<M> {
    fn default() -> Self {
        DynamicHistory {
            records: Vec::new(),
        }
    }
}

impl<M> DynamicHistory<M> {
    pub fn schedule(&self) -> Vec<RoundGraph> {
        self.records.iter().map(|r| (*r.graph).clone()).collect()
    }
}

/// A read outside the adversary's obliviousness window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditViolation {
    pub round: u64,
    pub requested_round: u64,
    pub tau: Horizon,
}

impl fmt::Display for AuditViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "round {}: adversary with tau = {} read randomness of round {}",
            self.round, self.tau, self.requested_round
        )
    }
}

/// What an adversary may see when choosing the graph of the current round:
/// the algorithm's random choices of rounds `<= round - tau`. For `tau = 0`
/// that includes the current round's transmit intents. Reads outside the
/// window are refused and logged.
pub struct HistoryView<'a, M> {
    round: u64,
    tau: Horizon,
    current: &'a [Option<M>],
    past: &'a VecDeque<RoundRecord<M>>,
    violations: &'a RefCell<Vec<AuditViolation>>,
}

impl<'a, M> HistoryView<'a, M> {
    pub fn new(
        round: u64,
        tau: Horizon,
        current: &'a [Option<M>],
        past: &'a VecDeque<RoundRecord<M>>,
        violations: &'a RefCell<Vec<AuditViolation>>,
    ) -> Self {
        HistoryView {
            round,
            tau,
            current,
            past,
            violations,
        }
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn node_count(&self) -> usize {
        self.current.len()
    }

    fn allowed(&self, r: u64) -> bool {
        match self.tau {
            Horizon::Finite(t) => r + t <= self.round,
            Horizon::Infinite => false,
        }
    }

    fn refuse(&self, r: u64) {
        self.violations.borrow_mut().push(AuditViolation {
            round: self.round,
            requested_round: r,
            tau: self.tau,
        });
    }

    /// This round's intents; only a 0-oblivious adversary may look.
    pub fn current_intents(&self) -> Option<&'a [Option<M>]> {
        if self.allowed(self.round) {
            Some(self.current)
        } else {
            self.refuse(self.round);
            None
        }
    }

    /// A completed earlier round. Returns `None` (without a violation) when
    /// the round is permitted but no longer retained.
    pub fn record(&self, r: u64) -> Option<&'a RoundRecord<M>> {
        if r >= self.round || !self.allowed(r) {
            self.refuse(r);
            return None;
        }
        self.past.iter().rev().find(|rec| rec.round == r)
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub round_limit: u64,
    /// Maximum broadcast messages per transmitted message; checked on every
    /// transmission when set.
    pub capacity: Option<usize>,
    /// Keep the full [`DynamicHistory`].
    pub trace: bool,
    /// Check the adversary's interval-connectivity promise online.
    pub audit_interval: bool,
}

impl RunOptions {
    pub fn new(seed: u64, round_limit: u64) -> Self {
        RunOptions {
            seed,
            round_limit,
            capacity: None,
            trace: false,
            audit_interval: true,
        }
    }

    pub fn capacity(mut self, c: usize) -> Self {
        self.capacity = Some(c);
        self
    }

    pub fn traced(mut self) -> Self {
        self.trace = true;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub simulated_rounds: u64,
    pub skipped_rounds: u64,
    pub transmissions: u64,
    /// Rounds with exactly one transmitter in the whole network.
    pub isolation_rounds: u64,
    /// Rounds with two or more transmitters.
    pub collision_rounds: u64,
    pub learning_events: u64,
    pub max_learning_in_round: u64,
}

#[derive(Clone, Debug, Default)]
pub struct AuditReport {
    pub tau_violations: Vec<AuditViolation>,
    /// Round closing the first window that broke the adversary's promise.
    pub interval_failure: Option<u64>,
    pub capacity_violations: u64,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.tau_violations.is_empty()
            && self.interval_failure.is_none()
            && self.capacity_violations == 0
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome<M> {
    pub rounds: u64,
    pub finished: bool,
    pub stats: RunStats,
    pub audit: AuditReport,
    pub history: Option<DynamicHistory<M>>,
}

/// Runs `protocol` against `adversary` until the protocol finishes or the
/// round limit is reached. The protocol's random stream is
/// `seeded_rng(opts.seed, "protocol")`.
pub fn run<P, A>(
    protocol: &mut P,
    adversary: &mut A,
    opts: &RunOptions,
) -> Result<RunOutcome<P::Msg>>
where
    P: Protocol,
    A: AdversaryPolicy<P::Msg> + ?Sized,
{
    let n = protocol.node_count();
    let tau = adversary.tau();
    let mut rng = seeded_rng(opts.seed, labels::PROTOCOL);
    let mut auditor = if opts.audit_interval {
        Some(IntervalAuditor::new(n, adversary.promise())?)
    } else {
        None
    };
    let lookback = adversary.lookback();
    let mut window: VecDeque<RoundRecord<P::Msg>> = VecDeque::new();
    let mut history = opts.trace.then(DynamicHistory::default);
    let violations = RefCell::new(Vec::new());

    let mut intents: Vec<Option<P::Msg>> = (0..n).map(|_| None).collect();
    let mut senders: Vec<Option<NodeId>> = vec![None; n];
    let mut tx = NodeSet::new(n);
    let mut stats = RunStats::default();
    let mut capacity_violations = 0;
    let mut round = 0u64;
    let mut known = protocol.known_pairs();

    while !protocol.is_finished() && round < opts.round_limit {
        let r = round + 1;
        intents.iter_mut().for_each(|m| *m = None);
        if let Step::Idle(k) = protocol.transmit(r, &mut rng, &mut intents) {
            debug_assert!(
                intents.iter().all(Option::is_none),
                "idle step with pending transmissions"
            );
            let k = k.max(1).min(opts.round_limit - round);
            round += k;
            stats.skipped_rounds += k;
            continue;
        }

        tx.clear();
        let mut count = 0u64;
        for (v, m) in intents.iter().enumerate() {
            if let Some(m) = m {
                tx.insert(v);
                count += 1;
                if opts.capacity.is_some_and(|c| m.load() > c) {
                    capacity_violations += 1;
                }
            }
        }
        stats.transmissions += count;
        match count {
            0 => {}
            1 => stats.isolation_rounds += 1,
            _ => stats.collision_rounds += 1,
        }

        let graph = {
            let view = HistoryView::new(r, tau, &intents, &window, &violations);
            adversary.next_graph(&view)
        };
        if graph.node_count() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: graph.node_count(),
            });
        }
        if let Some(a) = auditor.as_mut() {
            a.push(&graph);
        }

        resolve_senders(&graph, &tx, &mut senders);
        protocol.receive(r, &Heard::new(&intents, &senders));
        stats.simulated_rounds += 1;

        let now = protocol.known_pairs();
        if let (Some(before), Some(after)) = (known, now) {
            let learned = after.saturating_sub(before);
            stats.learning_events += learned;
            stats.max_learning_in_round = stats.max_learning_in_round.max(learned);
        }
        known = now;

        if lookback > 0 || history.is_some() {
            let rec = RoundRecord {
                round: r,
                intents: intents.clone(),
                graph,
                senders: senders.clone(),
            };
            if lookback > 0 {
                window.push_back(rec.clone());
                while window.len() > lookback {
                    window.pop_front();
                }
            }
            if let Some(h) = history.as_mut() {
                h.records.push(rec);
            }
        }
        round = r;
    }

    Ok(RunOutcome {
        rounds: round,
        finished: protocol.is_finished(),
        stats,
        audit: AuditReport {
            tau_violations: violations.into_inner(),
            interval_failure: auditor.and_then(|a| a.finish()),
            capacity_violations,
        },
        history,
    })
}
