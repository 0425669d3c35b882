use rand::seq::IteratorRandom;
use serde::{Deserialize, Serialize};

use super::{check_sources, Knowledge};
use crate::engine::{Protocol, Step};
use crate::error::{domain, Result};
use crate::primitives::{MsgId, NodeId};
use crate::radio::Heard;
use crate::rng::SimRng;
use crate::sf::{Bundle, LimitedRun, Prob, Setting, SfMessage};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Algorithm1Params {
    /// Iterations per phase: `alpha * n * s / (c * ell) * ln n`.
    pub alpha: f64,
}

impl Default for Algorithm1Params {
    fn default() -> Self {
        Algorithm1Params { alpha: 24.0 }
    }
}

/// State at the end of one outer phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseRecord {
    pub phase: u32,
    pub ell: u64,
    pub iterations: u64,
    pub end_round: u64,
    /// Fewest nodes knowing any single message.
    pub min_multiplicity: u32,
}

/// Coupon-collection based multi-message broadcast for capacity `c`.
///
/// Phase `i = 1..=ceil(log2 n)` targets `ell = 2^i` copies of every message.
/// Each of its iterations marks every node with probability `1/n`; a marked
/// node packs up to `c` of the messages it knows and all marked nodes start
/// one shared `min(ell, n)`-limited broadcast.
///
/// Iterations that cannot teach anybody anything (no initiator, or every
/// node already knows all packed messages) are fast-forwarded, as is the
/// whole remainder once every node knows every message.
#[derive(Clone, Debug)]
pub struct Algorithm1 {
    n: usize,
    s: usize,
    c: usize,
    alpha: f64,
    setting: Setting,
    knowledge: Knowledge,
    phases: u32,
    phase: u32,
    iteration: u64,
    iterations: u64,
    run: Option<LimitedRun>,
    packed: Vec<MsgId>,
    elapsed: u64,
    completed_at: Option<u64>,
    phase_log: Vec<PhaseRecord>,
    max_load: usize,
    finished: bool,
}

impl Algorithm1 {
    pub fn new(
        n: usize,
        c: usize,
        sources: &[NodeId],
        setting: Setting,
        params: &Algorithm1Params,
    ) -> Result<Self> {
        let s = sources.len();
        check_sources(n, s, sources)?;
        setting.validate()?;
        if c < 1 {
            return Err(domain("capacity must be at least 1"));
        }
        if params.alpha <= 0.0 {
            return Err(domain("alpha must be positive"));
        }
        let phases = (n as f64).log2().ceil().max(1.0) as u32;
        let mut a = Algorithm1 {
            n,
            s,
            c,
            alpha: params.alpha,
            setting,
            knowledge: Knowledge::with_sources(n, sources),
            phases,
            phase: 1,
            iteration: 0,
            iterations: 0,
            run: None,
            packed: Vec::new(),
            elapsed: 0,
            completed_at: None,
            phase_log: Vec::new(),
            max_load: 0,
            finished: false,
        };
        a.iterations = a.iterations_in(1);
        if a.knowledge.is_complete() {
            a.completed_at = Some(0);
        }
        Ok(a)
    }

    fn ell(phase: u32) -> u64 {
        1u64 << phase.min(62)
    }

    fn iterations_in(&self, phase: u32) -> u64 {
        let ell = Self::ell(phase) as f64;
        let x =
            self.alpha * (self.n * self.s) as f64 / (self.c as f64 * ell) * (self.n as f64).ln();
        x.ceil().max(1.0) as u64
    }

    fn budget_in(&self, phase: u32) -> u64 {
        let k = Self::ell(phase).min(self.n as u64) as usize;
        self.setting.limited(self.n, k).1
    }

    /// Total rounds of a complete execution.
    pub fn total_rounds(&self) -> u64 {
        (1..=self.phases)
            .map(|p| self.iterations_in(p) * self.budget_in(p))
            .sum()
    }

    pub fn knowledge(&self) -> &Knowledge {
        &self.knowledge
    }

    pub fn phase_log(&self) -> &[PhaseRecord] {
        &self.phase_log
    }

    /// Round at which every node knew every message.
    pub fn completed_at(&self) -> Option<u64> {
        self.completed_at
    }

    pub fn max_load(&self) -> usize {
        self.max_load
    }

    pub fn elapsed(&self) -> u64 {
        self.elapsed
    }

    fn end_iteration(&mut self) {
        self.run = None;
        self.iteration += 1;
        if self.iteration == self.iterations {
            self.phase_log.push(PhaseRecord {
                phase: self.phase,
                ell: Self::ell(self.phase),
                iterations: self.iterations,
                end_round: self.elapsed,
                min_multiplicity: self.knowledge.min_multiplicity(),
            });
            self.phase += 1;
            self.iteration = 0;
            if self.phase > self.phases {
                self.finished = true;
            } else {
                self.iterations = self.iterations_in(self.phase);
            }
        }
    }

    fn skip_to_end(&mut self) -> Step {
        let mut total = 0;
        if let Some(run) = self.run.take() {
            total += run.remaining();
            self.elapsed += run.remaining();
            self.end_iteration();
        }
        while !self.finished {
            let rounds = (self.iterations - self.iteration) * self.budget_in(self.phase);
            total += rounds;
            self.elapsed += rounds;
            self.iteration = self.iterations - 1;
            self.end_iteration();
        }
        Step::Idle(total)
    }

    fn packed_known_by_all(&self) -> bool {
        self.packed
            .iter()
            .all(|&id| self.knowledge.known_by_all(id))
    }

    fn start_iteration(&mut self, rng: &mut SimRng) -> Option<Step> {
        let (schedule, budget) = self
            .setting
            .limited(self.n, Self::ell(self.phase).min(self.n as u64) as usize);
        let mut run = LimitedRun::new(self.n, schedule, budget);
        self.packed.clear();
        let mark = Prob::OneIn(self.n as u64);
        for v in 0..self.n {
            if !mark.draw(rng) {
                continue;
            }
            let known = self.knowledge.known(v);
            let k = known.len().min(self.c);
            let mut bundle: Bundle = known
                .iter()
                .map(|x| x as MsgId)
                .choose_multiple(rng, k)
                .into_iter()
                .collect();
            bundle.sort_unstable();
            self.packed.extend_from_slice(&bundle);
            run.initiate(v, SfMessage::Data(bundle));
        }
        self.packed.sort_unstable();
        self.packed.dedup();
        if self.packed.is_empty() || self.packed_known_by_all() {
            self.elapsed += budget;
            self.end_iteration();
            return Some(Step::Idle(budget));
        }
        self.run = Some(run);
        None
    }
}

impl Protocol for Algorithm1 {
    type Msg = SfMessage;

    fn node_count(&self) -> usize {
        self.n
    }

    fn transmit(&mut self, _round: u64, rng: &mut SimRng, out: &mut [Option<SfMessage>]) -> Step {
        if self.knowledge.is_complete() {
            return self.skip_to_end();
        }
        if self.run.is_none() {
            if let Some(step) = self.start_iteration(rng) {
                return step;
            }
        }
        if self.packed_known_by_all() {
            let run = self.run.as_mut().expect("iteration in progress");
            let step = run.abandon();
            if let Step::Idle(k) = step {
                self.elapsed += k;
            }
            self.end_iteration();
            return step;
        }
        let run = self.run.as_mut().expect("iteration in progress");
        let step = run.transmit(rng, out);
        match step {
            Step::Idle(k) => {
                self.elapsed += k;
                self.end_iteration();
            }
            Step::Transmit => {
                for m in out.iter().flatten() {
                    if let SfMessage::Data(b) = m {
                        self.max_load = self.max_load.max(b.len());
                    }
                }
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
        if self.completed_at.is_none() && self.knowledge.is_complete() {
            self.completed_at = Some(self.elapsed);
        }
        let run = self.run.as_mut().expect("iteration in progress");
        run.receive(heard);
        if run.is_done() {
            self.end_iteration();
        }
    }

    fn is_finished(&self) -> bool {
        self.finished
    }

    fn known_pairs(&self) -> Option<u64> {
        Some(self.knowledge.pairs())
    }
}
