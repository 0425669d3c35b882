use crate::bitset::NodeSet;
use crate::engine::{Protocol, Step};
use crate::error::{domain, Result};
use crate::primitives::MsgId;
use crate::radio::Heard;
use crate::rng::SimRng;

use super::{Detection, LimitedRun, ResistantRun, Setting, SfMessage};

#[derive(Clone, Debug)]
enum Run {
    Limited(LimitedRun),
    Resistant(ResistantRun),
}

/// A standalone single-message broadcast as an engine protocol.
#[derive(Clone, Debug)]
pub struct SingleBroadcast {
    n: usize,
    run: Run,
    isolation_log: Vec<u64>,
    rounds: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingleBcastOutcome {
    pub informed: NodeSet,
    pub rounds_used: u64,
    /// Per-node verdicts; only for concurrency-resistant runs.
    pub detection: Option<Vec<Detection>>,
    /// Simulated rounds in which exactly one node transmitted.
    pub isolation_log: Vec<u64>,
}

impl SingleBcastOutcome {
    pub fn unanimous(&self) -> Option<Detection> {
        let d = self.detection.as_ref()?;
        let first = *d.first()?;
        d.iter().all(|x| *x == first).then_some(first)
    }
}

impl SingleBroadcast {
    /// k-limited broadcast of message 0 from `sources`.
    pub fn limited(n: usize, setting: &Setting, sources: &[usize], k: usize) -> Result<Self> {
        if k < 1 {
            return Err(domain("k must be at least 1"));
        }
        setting.validate()?;
        let (schedule, budget) = setting.limited(n, k);
        let mut run = LimitedRun::new(n, schedule, budget);
        for &v in sources {
            run.initiate(v, SfMessage::single(0));
        }
        Ok(Self::wrap(n, Run::Limited(run)))
    }

    /// Concurrency-resistant broadcast; each source brings its own message.
    pub fn resistant(n: usize, setting: &Setting, sources: &[(usize, MsgId)]) -> Result<Self> {
        setting.validate()?;
        let mut run = ResistantRun::new(setting.resistant_plan(n));
        for &(v, id) in sources {
            run.initiate(v, id);
        }
        Ok(Self::wrap(n, Run::Resistant(run)))
    }

    fn wrap(n: usize, run: Run) -> Self {
        SingleBroadcast {
            n,
            run,
            isolation_log: Vec::new(),
            rounds: 0,
        }
    }

    pub fn budget(&self) -> u64 {
        match &self.run {
            Run::Limited(r) => r.budget(),
            Run::Resistant(r) => r.plan().total_rounds(),
        }
    }

    pub fn outcome(&self) -> SingleBcastOutcome {
        let (informed, detection) = match &self.run {
            Run::Limited(r) => (r.informed().clone(), None),
            Run::Resistant(r) => (r.informed().clone(), Some(r.detections())),
        };
        SingleBcastOutcome {
            informed,
            rounds_used: self.rounds,
            detection,
            isolation_log: self.isolation_log.clone(),
        }
    }
}

impl Protocol for SingleBroadcast {
    type Msg = SfMessage;

    fn node_count(&self) -> usize {
        self.n
    }

    fn transmit(&mut self, round: u64, rng: &mut SimRng, out: &mut [Option<SfMessage>]) -> Step {
        let step = match &mut self.run {
            Run::Limited(r) => r.transmit(rng, out),
            Run::Resistant(r) => r.transmit(rng, out),
        };
        match step {
            Step::Idle(k) => self.rounds += k,
            Step::Transmit => {
                if out.iter().filter(|m| m.is_some()).count() == 1 {
                    self.isolation_log.push(round);
                }
            }
        }
        step
    }

    fn receive(&mut self, _round: u64, heard: &Heard<'_, SfMessage>) {
        match &mut self.run {
            Run::Limited(r) => r.receive(heard),
            Run::Resistant(r) => r.receive(heard),
        }
        self.rounds += 1;
    }

    fn is_finished(&self) -> bool {
        match &self.run {
            Run::Limited(r) => r.is_done(),
            Run::Resistant(r) => r.is_done(),
        }
    }

    fn known_pairs(&self) -> Option<u64> {
        Some(match &self.run {
            Run::Limited(r) => r.informed().len() as u64,
            Run::Resistant(r) => (0..self.n)
                .map(|v| r.known(v).is_some() as u64 + r.knows_several(v) as u64)
                .sum(),
        })
    }
}
