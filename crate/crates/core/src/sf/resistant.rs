use crate::bitset::NodeSet;
use crate::engine::Step;
use crate::primitives::MsgId;
use crate::radio::Heard;
use crate::rng::SimRng;

use super::{Prob, Schedule, SfMessage};

const ASLEEP: u64 = u64::MAX;

/// Stage lengths and schedules of one concurrency-resistant run.
#[derive(Clone, Debug, PartialEq)]
pub struct ResistantPlan {
    pub n: usize,
    pub dissemination: Schedule,
    pub dissemination_rounds: u64,
    /// Rounds in which nodes knowing exactly one message transmit with
    /// probability `1/n`. Absent in infinite-interval networks.
    pub pairing_rounds: Option<u64>,
    pub bottom: Schedule,
    pub bottom_rounds: u64,
}

impl ResistantPlan {
    pub fn total_rounds(&self) -> u64 {
        self.dissemination_rounds + self.pairing_rounds.unwrap_or(0) + self.bottom_rounds
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detection {
    Success,
    Failure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResistantStage {
    Dissemination,
    Pairing,
    Bottom,
    Done,
}

/// Concurrency-resistant single-message broadcast.
///
/// Sources disseminate their messages; nodes relay the first message they
/// hear and remember whether they ever heard a different one. In 1- and
/// T-interval networks a pairing stage lets neighbours with different single
/// messages meet. Finally every node that knows two messages floods the
/// control message [`SfMessage::Bottom`]. A node detects success iff it knows
/// exactly one message and never heard the control message.
#[derive(Clone, Debug)]
pub struct ResistantRun {
    plan: ResistantPlan,
    stage: ResistantStage,
    elapsed: u64,
    first: Vec<Option<MsgId>>,
    two: NodeSet,
    wake: Vec<u64>,
    informed: NodeSet,
    distinct_sources: usize,
    bottom_wake: Vec<u64>,
    bottom: NodeSet,
}

impl ResistantRun {
    pub fn new(plan: ResistantPlan) -> Self {
        let n = plan.n;
        let mut run = ResistantRun {
            plan,
            stage: ResistantStage::Dissemination,
            elapsed: 0,
            first: vec![None; n],
            two: NodeSet::new(n),
            wake: vec![ASLEEP; n],
            informed: NodeSet::new(n),
            distinct_sources: 0,
            bottom_wake: vec![ASLEEP; n],
            bottom: NodeSet::new(n),
        };
        run.settle();
        run
    }

    /// Makes `v` a source of `id`. Must be called before the first round.
    pub fn initiate(&mut self, v: usize, id: MsgId) {
        debug_assert!(self.stage == ResistantStage::Dissemination && self.elapsed == 0);
        if !self.first.iter().flatten().any(|&m| m == id) {
            self.distinct_sources += 1;
        }
        match self.first[v] {
            None => {
                self.first[v] = Some(id);
                self.wake[v] = 0;
                self.informed.insert(v);
            }
            Some(m) if m != id => {
                self.two.insert(v);
            }
            _ => {}
        }
    }

    pub fn plan(&self) -> &ResistantPlan {
        &self.plan
    }

    pub fn stage(&self) -> ResistantStage {
        self.stage
    }

    pub fn is_done(&self) -> bool {
        self.stage == ResistantStage::Done
    }

    /// First message node `v` learned.
    pub fn known(&self, v: usize) -> Option<MsgId> {
        self.first[v]
    }

    pub fn knows_several(&self, v: usize) -> bool {
        self.two.contains(v)
    }

    pub fn heard_bottom(&self, v: usize) -> bool {
        self.bottom.contains(v)
    }

    pub fn informed(&self) -> &NodeSet {
        &self.informed
    }

    pub fn detection(&self, v: usize) -> Detection {
        if self.first[v].is_some() && !self.two.contains(v) && !self.bottom.contains(v) {
            Detection::Success
        } else {
            Detection::Failure
        }
    }

    pub fn detections(&self) -> Vec<Detection> {
        (0..self.plan.n).map(|v| self.detection(v)).collect()
    }

    /// The delivered message if every node detects success.
    pub fn delivered(&self) -> Option<MsgId> {
        let id = self.first[0]?;
        (0..self.plan.n)
            .all(|v| self.detection(v) == Detection::Success && self.first[v] == Some(id))
            .then_some(id)
    }

    fn stage_len(&self) -> u64 {
        match self.stage {
            ResistantStage::Dissemination => self.plan.dissemination_rounds,
            ResistantStage::Pairing => self.plan.pairing_rounds.unwrap_or(0),
            ResistantStage::Bottom => self.plan.bottom_rounds,
            ResistantStage::Done => 0,
        }
    }

    /// Moves past finished (or empty) stages.
    fn settle(&mut self) {
        while self.stage != ResistantStage::Done && self.elapsed >= self.stage_len() {
            self.elapsed = 0;
            self.stage = match self.stage {
                ResistantStage::Dissemination => ResistantStage::Pairing,
                ResistantStage::Pairing => {
                    for v in self.two.iter() {
                        self.bottom.insert(v);
                        self.bottom_wake[v] = 0;
                    }
                    ResistantStage::Bottom
                }
                ResistantStage::Bottom | ResistantStage::Done => ResistantStage::Done,
            };
        }
    }

    fn settled_knowledge(&self) -> bool {
        self.informed.is_full() && (self.distinct_sources <= 1 || self.two.is_full())
    }

    fn stalled(&self) -> bool {
        match self.stage {
            ResistantStage::Dissemination => self.informed.is_empty() || self.settled_knowledge(),
            ResistantStage::Pairing => {
                self.settled_knowledge() || self.informed.iter().all(|v| self.two.contains(v))
            }
            ResistantStage::Bottom => self.bottom.is_empty() || self.bottom.is_full(),
            ResistantStage::Done => true,
        }
    }

    pub fn transmit(&mut self, rng: &mut SimRng, out: &mut [Option<SfMessage>]) -> Step {
        debug_assert!(!self.is_done());
        if self.stalled() {
            let k = self.stage_len() - self.elapsed;
            self.elapsed += k;
            self.settle();
            return Step::Idle(k);
        }
        let r = self.elapsed + 1;
        match self.stage {
            ResistantStage::Dissemination => {
                let schedule = &self.plan.dissemination;
                for v in self.informed.iter() {
                    if schedule.prob(r, self.wake[v]).draw(rng) {
                        out[v] = self.first[v].map(SfMessage::single);
                    }
                }
            }
            ResistantStage::Pairing => {
                let p = Prob::OneIn(self.plan.n as u64);
                for v in self.informed.iter() {
                    if !self.two.contains(v) && p.draw(rng) {
                        out[v] = self.first[v].map(SfMessage::single);
                    }
                }
            }
            ResistantStage::Bottom => {
                let schedule = &self.plan.bottom;
                for v in self.bottom.iter() {
                    if schedule.prob(r, self.bottom_wake[v]).draw(rng) {
                        out[v] = Some(SfMessage::Bottom);
                    }
                }
            }
            ResistantStage::Done => unreachable!(),
        }
        Step::Transmit
    }

    pub fn receive(&mut self, heard: &Heard<'_, SfMessage>) {
        let r = self.elapsed + 1;
        for (v, _, m) in heard.iter() {
            match m {
                SfMessage::Data(ids) => {
                    for &id in ids {
                        match self.first[v] {
                            None => {
                                self.first[v] = Some(id);
                                self.wake[v] = r;
                                self.informed.insert(v);
                            }
                            Some(f) if f != id => {
                                self.two.insert(v);
                            }
                            _ => {}
                        }
                    }
                }
                SfMessage::Bottom => {
                    if self.bottom.insert(v) {
                        self.bottom_wake[v] = r;
                    }
                }
            }
        }
        self.elapsed = r;
        self.settle();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(n: usize) -> ResistantPlan {
        ResistantPlan {
            n,
            dissemination: Schedule::Harmonic { period: 4 },
            dissemination_rounds: 10,
            pairing_rounds: Some(5),
            bottom: Schedule::Harmonic { period: 4 },
            bottom_rounds: 10,
        }
    }

    #[test]
    fn zero_sources_skip_to_failure() {
        let mut run = ResistantRun::new(plan(4));
        let mut rng = crate::rng::seeded_rng(0, "t");
        let mut total = 0;
        while !run.is_done() {
            let mut out = vec![None; 4];
            match run.transmit(&mut rng, &mut out) {
                Step::Idle(k) => total += k,
                Step::Transmit => panic!("nobody should transmit"),
            }
        }
        assert_eq!(total, 25);
        assert!(run.detections().iter().all(|d| *d == Detection::Failure));
        assert_eq!(run.delivered(), None);
    }

    #[test]
    fn a_node_sourcing_two_messages_is_a_witness() {
        let mut run = ResistantRun::new(plan(3));
        run.initiate(1, 4);
        run.initiate(1, 5);
        assert!(run.knows_several(1));
        assert_eq!(run.detection(1), Detection::Failure);
    }
}
