use serde::{Deserialize, Serialize};

use super::{check_sources, Knowledge};
use crate::engine::{Protocol, Step};
use crate::error::Result;
use crate::primitives::{MsgId, NodeId};
use crate::radio::Heard;
use crate::rng::SimRng;
use crate::sf::{Detection, Prob, ResistantPlan, ResistantRun, Setting, SfMessage};

use rand::Rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Algorithm2Params {
    /// Phase cap as a multiple of `s + ceil(log2 n)`.
    pub phase_cap_factor: u64,
}

impl Default for Algorithm2Params {
    fn default() -> Self {
        Algorithm2Params {
            phase_cap_factor: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alg2PhaseRecord {
    pub phase: u64,
    /// Undelivered messages at the start of the phase.
    pub x: u64,
    pub marked: usize,
    pub initiators: Vec<(NodeId, MsgId)>,
    pub delivered: Option<MsgId>,
    pub unanimous: bool,
    pub end_round: u64,
}

/// Multi-message broadcast for capacity 1 on top of a concurrency-resistant
/// single-message broadcast.
///
/// Every node keeps its own count `x` of undelivered messages. Each phase,
/// every source marks each of its pending messages with probability `1/x`
/// and, if it marked any, starts the resistant broadcast with one of them
/// chosen uniformly. When a node detects success it decrements `x`; the
/// source of the delivered message drops it from its pending set.
#[derive(Clone, Debug)]
pub struct Algorithm2 {
    n: usize,
    s: usize,
    plan: ResistantPlan,
    knowledge: Knowledge,
    sources: Vec<NodeId>,
    pending: Vec<Vec<MsgId>>,
    x: Vec<u64>,
    delivered: Vec<bool>,
    phase: u64,
    cap: u64,
    run: Option<ResistantRun>,
    current: Option<Alg2PhaseRecord>,
    log: Vec<Alg2PhaseRecord>,
    violations: Vec<String>,
    elapsed: u64,
    completed_at: Option<u64>,
    livelock: bool,
}

impl Algorithm2 {
    pub fn new(
        n: usize,
        sources: &[NodeId],
        setting: &Setting,
        params: &Algorithm2Params,
    ) -> Result<Self> {
        let s = sources.len();
        check_sources(n, s, sources)?;
        setting.validate()?;
        let mut pending = vec![Vec::new(); n];
        for (i, v) in sources.iter().enumerate() {
            pending[v.index()].push(i as MsgId);
        }
        let log_n = (n as f64).log2().ceil() as u64;
        Ok(Algorithm2 {
            n,
            s,
            plan: setting.resistant_plan(n),
            knowledge: Knowledge::with_sources(n, sources),
            sources: sources.to_vec(),
            pending,
            x: vec![s as u64; n],
            delivered: vec![false; s],
            phase: 0,
            cap: params.phase_cap_factor.max(1) * (s as u64 + log_n),
            run: None,
            current: None,
            log: Vec::new(),
            violations: Vec::new(),
            elapsed: 0,
            completed_at: None,
            livelock: false,
        })
    }

    pub fn knowledge(&self) -> &Knowledge {
        &self.knowledge
    }

    pub fn phase_log(&self) -> &[Alg2PhaseRecord] {
        &self.log
    }

    pub fn phases(&self) -> u64 {
        self.log.len() as u64
    }

    /// Broken invariants (disagreeing counters, wrong or repeated deliveries).
    pub fn violations(&self) -> &[String] {
        &self.violations
    }

    pub fn hit_phase_cap(&self) -> bool {
        self.livelock
    }

    pub fn completed_at(&self) -> Option<u64> {
        self.completed_at
    }

    pub fn x(&self) -> &[u64] {
        &self.x
    }

    pub fn resistant_rounds(&self) -> u64 {
        self.plan.total_rounds()
    }

    fn start_phase(&mut self, rng: &mut SimRng) {
        self.phase += 1;
        let mut run = ResistantRun::new(self.plan.clone());
        let mut initiators = Vec::new();
        let mut marked_total = 0;
        for v in 0..self.n {
            if self.pending[v].is_empty() {
                continue;
            }
            let mark = Prob::OneIn(self.x[v].max(1));
            let marked: Vec<MsgId> = self.pending[v]
                .iter()
                .copied()
                .filter(|_| mark.draw(rng))
                .collect();
            marked_total += marked.len();
            if !marked.is_empty() {
                let id = marked[rng.random_range(0..marked.len())];
                run.initiate(v, id);
                initiators.push((NodeId::from(v), id));
            }
        }
        self.current = Some(Alg2PhaseRecord {
            phase: self.phase,
            x: self.x[0],
            marked: marked_total,
            initiators,
            delivered: None,
            unanimous: false,
            end_round: 0,
        });
        self.run = Some(run);
    }

    fn finish_phase(&mut self) {
        let run = self.run.take().expect("phase in progress");
        let mut rec = self.current.take().expect("phase in progress");
        let detections = run.detections();
        rec.unanimous = detections.iter().all(|d| *d == detections[0]);
        for (v, d) in detections.iter().enumerate() {
            if *d == Detection::Success {
                self.x[v] = self.x[v].saturating_sub(1);
            }
        }
        if let Some(id) = run.delivered() {
            rec.delivered = Some(id);
            if self.delivered[id as usize] {
                self.violations
                    .push(format!("phase {}: message {id} delivered twice", rec.phase));
            }
            if rec.initiators.len() != 1 || rec.initiators[0].1 != id {
                self.violations.push(format!(
                    "phase {}: message {id} delivered without being the only initiated message",
                    rec.phase
                ));
            }
            self.delivered[id as usize] = true;
            let src = self.sources[id as usize].index();
            self.pending[src].retain(|&m| m != id);
        }
        if self.x.iter().any(|&x| x != self.x[0]) {
            self.violations.push(format!(
                "phase {}: nodes disagree on the undelivered count",
                rec.phase
            ));
        }
        rec.end_round = self.elapsed;
        self.log.push(rec);
        if self.x[0] == 0 && self.completed_at.is_none() {
            self.completed_at = Some(self.elapsed);
        }
        if self.phase >= self.cap && !self.is_finished() {
            self.livelock = true;
        }
    }
}

impl Protocol for Algorithm2 {
    type Msg = SfMessage;

    fn node_count(&self) -> usize {
        self.n
    }

    fn transmit(&mut self, _round: u64, rng: &mut SimRng, out: &mut [Option<SfMessage>]) -> Step {
        if self.run.is_none() {
            self.start_phase(rng);
        }
        let run = self.run.as_mut().expect("phase in progress");
        let step = run.transmit(rng, out);
        if let Step::Idle(k) = step {
            self.elapsed += k;
            if run.is_done() {
                self.finish_phase();
            }
        }
        step
    }

    fn receive(&mut self, _round: u64, heard: &Heard<'_, SfMessage>) {
        self.elapsed += 1;
        for (v, _, m) in heard.iter() {
            if let SfMessage::Data(ids) = m {
                for &id in ids {
                    self.knowledge.learn(v, id, self.elapsed);
                }
            }
        }
        let run = self.run.as_mut().expect("phase in progress");
        run.receive(heard);
        if run.is_done() {
            self.finish_phase();
        }
    }

    fn is_finished(&self) -> bool {
        self.livelock || (self.run.is_none() && self.x.iter().all(|&x| x == 0))
    }

    fn known_pairs(&self) -> Option<u64> {
        Some(self.knowledge.pairs())
    }
}

impl Algorithm2 {
    pub fn message_count(&self) -> usize {
        self.s
    }
}
