use crate::bitset::NodeSet;
use crate::engine::Step;
use crate::radio::Heard;
use crate::rng::SimRng;

use super::{Schedule, SfMessage};

const ASLEEP: u64 = u64::MAX;

/// One k-limited single-message broadcast of fixed length.
///
/// Initiators start with their payload at local round 0. Every other node
/// relays the first payload it hears, waking up in the round it heard it.
/// Once nothing can change (nobody informed, or everyone informed and only
/// one payload in play) the remaining rounds are fast-forwarded.
#[derive(Clone, Debug)]
pub struct LimitedRun {
    schedule: Schedule,
    budget: u64,
    elapsed: u64,
    wake: Vec<u64>,
    payload: Vec<Option<SfMessage>>,
    informed: NodeSet,
    initial: Option<SfMessage>,
    mixed: bool,
}

impl LimitedRun {
    pub fn new(n: usize, schedule: Schedule, budget: u64) -> Self {
        LimitedRun {
            schedule,
            budget,
            elapsed: 0,
            wake: vec![ASLEEP; n],
            payload: vec![None; n],
            informed: NodeSet::new(n),
            initial: None,
            mixed: false,
        }
    }

    /// Makes `v` an initiator. Must be called before the first round.
    pub fn initiate(&mut self, v: usize, msg: SfMessage) {
        debug_assert_eq!(self.elapsed, 0);
        match &self.initial {
            None => self.initial = Some(msg.clone()),
            Some(m) if *m != msg => self.mixed = true,
            _ => {}
        }
        self.wake[v] = 0;
        self.payload[v] = Some(msg);
        self.informed.insert(v);
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn elapsed(&self) -> u64 {
        self.elapsed
    }

    pub fn remaining(&self) -> u64 {
        self.budget - self.elapsed
    }

    pub fn is_done(&self) -> bool {
        self.elapsed >= self.budget
    }

    pub fn informed(&self) -> &NodeSet {
        &self.informed
    }

    pub fn payload(&self, v: usize) -> Option<&SfMessage> {
        self.payload[v].as_ref()
    }

    /// Local round in which `v` first held a payload (0 for initiators).
    pub fn wake(&self, v: usize) -> Option<u64> {
        (self.wake[v] != ASLEEP).then_some(self.wake[v])
    }

    fn stalled(&self) -> bool {
        self.informed.is_empty() || (self.informed.is_full() && !self.mixed)
    }

    /// Skips the rest of the run.
    pub fn abandon(&mut self) -> Step {
        let k = self.remaining();
        self.elapsed = self.budget;
        Step::Idle(k)
    }

    /// Writes this round's transmissions into `out`.
    pub fn transmit(&mut self, rng: &mut SimRng, out: &mut [Option<SfMessage>]) -> Step {
        debug_assert!(!self.is_done());
        if self.stalled() {
            return self.abandon();
        }
        let r = self.elapsed + 1;
        for v in self.informed.iter() {
            if self.schedule.prob(r, self.wake[v]).draw(rng) {
                out[v] = self.payload[v].clone();
            }
        }
        Step::Transmit
    }

    /// Consumes the round's receptions and advances the local clock.
    pub fn receive(&mut self, heard: &Heard<'_, SfMessage>) {
        let r = self.elapsed + 1;
        for (v, _, m) in heard.iter() {
            if self.payload[v].is_none() {
                self.payload[v] = Some(m.clone());
                self.wake[v] = r;
                self.informed.insert(v);
            }
        }
        self.elapsed = r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RoundGraph;
    use crate::radio::resolve_senders;
    use crate::rng::seeded_rng;

    fn drive(run: &mut LimitedRun, graph: &RoundGraph, rng: &mut SimRng) -> u64 {
        let n = graph.node_count();
        let mut rounds = 0;
        while !run.is_done() {
            let mut out = vec![None; n];
            match run.transmit(rng, &mut out) {
                Step::Idle(k) => rounds += k,
                Step::Transmit => {
                    let tx = crate::radio::transmitter_set(&out);
                    let mut senders = vec![None; n];
                    resolve_senders(graph, &tx, &mut senders);
                    run.receive(&Heard::new(&out, &senders));
                    rounds += 1;
                }
            }
        }
        rounds
    }

    #[test]
    fn budget_is_consumed_exactly() {
        let mut rng = seeded_rng(1, "t");
        for budget in [1, 7, 500] {
            let mut run = LimitedRun::new(6, Schedule::Harmonic { period: 3 }, budget);
            run.initiate(0, SfMessage::single(0));
            assert_eq!(drive(&mut run, &RoundGraph::path(6), &mut rng), budget);
        }
    }

    #[test]
    fn no_initiator_skips_everything() {
        let mut rng = seeded_rng(1, "t");
        let mut run = LimitedRun::new(4, Schedule::Uniform { one_in: 4 }, 99);
        let mut out = vec![None; 4];
        assert_eq!(run.transmit(&mut rng, &mut out), Step::Idle(99));
        assert!(run.is_done());
    }

    #[test]
    fn spreads_along_a_path() {
        let mut rng = seeded_rng(2, "t");
        let mut run = LimitedRun::new(8, Schedule::Harmonic { period: 4 }, 2000);
        run.initiate(0, SfMessage::single(3));
        drive(&mut run, &RoundGraph::path(8), &mut rng);
        assert!(run.informed().is_full());
        assert!((0..8).all(|v| run.payload(v) == Some(&SfMessage::single(3))));
        // Wake-up rounds increase along the path.
        let wakes: Vec<u64> = (0..8).map(|v| run.wake(v).unwrap()).collect();
        assert!(wakes.windows(2).all(|w| w[0] < w[1]));
    }
}
