use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use crate::adversary::{
    AdversaryPolicy, IsolatingTree, RandomConnected, StableSubgraph, StaticAdversary,
    StrongDualGraph,
};
use crate::bitset::NodeSet;
use crate::engine::{run, HistoryView, RunOptions};
use crate::error::{config, Error, Result};
use crate::graph::{check_interval_connectivity, RoundGraph};
use crate::multi::default_sources;
use crate::primitives::{Horizon, NodeId};
use crate::radio::{resolve_round, Delivery, Reception, TransmitIntent};
use crate::rlnc::{CodedPacket, Decoded, Field, RlncBroadcast, RlncParams, SpanState};
use crate::rng::seeded_rng;

pub const VALIDATION_CHECKS: &[&str] = &["reception", "connectivity", "field", "span", "audit"];

/// Deliberate bugs, to show that the checks catch them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// The reception rule skips neighbour 0 when counting transmitters.
    ReceptionOffByOne,
    /// A 1-oblivious test adversary peeks at the current round.
    TauViolation,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reception-off-by-one" => Ok(Fault::ReceptionOffByOne),
            "tau-violation" => Ok(Fault::TauViolation),
            _ => Err(config(format!(
                "unknown fault {s:?}; valid: reception-off-by-one, tau-violation"
            ))),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidateOptions {
    /// Checks to run; empty means all.
    pub checks: Vec<String>,
    pub fault: Option<Fault>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Summary on success, counterexample on failure.
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub results: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(
                f,
                "{} {}: {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.detail
            )?;
        }
        Ok(())
    }
}

/// Runs the self-check suite.
pub fn validate(opts: &ValidateOptions) -> Result<ValidationReport> {
    for c in &opts.checks {
        if !VALIDATION_CHECKS.contains(&c.as_str()) {
            return Err(config(format!(
                "unknown check {c:?}; valid: {}",
                VALIDATION_CHECKS.join(", ")
            )));
        }
    }
    let mut report = ValidationReport::default();
    for &name in VALIDATION_CHECKS {
        if !opts.checks.is_empty() && !opts.checks.iter().any(|c| c == name) {
            continue;
        }
        let outcome = match name {
            "reception" => check_reception(opts.fault),
            "connectivity" => check_connectivity(opts.seed),
            "field" => check_field(opts.seed),
            "span" => check_span(opts.seed),
            _ => check_audit(opts.fault, opts.seed),
        };
        let (passed, detail) = match outcome {
            Ok(summary) => (true, summary),
            Err(why) => (false, why),
        };
        report.results.push(CheckResult {
            name,
            passed,
            detail,
        });
    }
    Ok(report)
}

type Check = std::result::Result<String, String>;

fn oracle_reception(g: &RoundGraph, tx: &[bool]) -> Vec<Option<usize>> {
    let n = tx.len();
    (0..n)
        .map(|u| {
            if tx[u] {
                return None;
            }
            let heard: Vec<usize> = (0..n)
                .filter(|&w| w != u && tx[w] && g.has_edge(u, w))
                .collect();
            (heard.len() == 1).then(|| heard[0])
        })
        .collect()
}

fn faulty_reception(g: &RoundGraph, tx: &[bool]) -> Vec<Option<usize>> {
    let n = tx.len();
    (0..n)
        .map(|u| {
            if tx[u] {
                return None;
            }
            let heard: Vec<usize> = (1..n)
                .filter(|&w| w != u && tx[w] && g.has_edge(u, w))
                .collect();
            (heard.len() == 1).then(|| heard[0])
        })
        .collect()
}

fn under_test(g: &RoundGraph, tx: &[bool], fault: Option<Fault>) -> Vec<Option<usize>> {
    if fault == Some(Fault::ReceptionOffByOne) {
        return faulty_reception(g, tx);
    }
    let intents = TransmitIntent(
        tx.iter()
            .enumerate()
            .map(|(v, &t)| t.then_some(v))
            .collect(),
    );
    let Reception(out) = resolve_round(g, &intents).expect("sizes match");
    out.into_iter()
        .map(|d| match d {
            Delivery::Received { message, from } => {
                assert_eq!(message, from.index());
                Some(message)
            }
            Delivery::Silence => None,
        })
        .collect()
}

/// Exhaustive over every graph and transmit pattern on up to 5 nodes.
fn check_reception(fault: Option<Fault>) -> Check {
    let mut cases = 0u64;
    for n in 1..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        for mask in 0u32..1 << pairs.len() {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e);
            let g = RoundGraph::from_edges(n, edges).expect("valid edges");
            for pattern in 0u32..1 << n {
                let tx: Vec<bool> = (0..n).map(|v| pattern >> v & 1 == 1).collect();
                let want = oracle_reception(&g, &tx);
                let got = under_test(&g, &tx, fault);
                cases += 1;
                if let Some(u) = (0..n).find(|&u| want[u] != got[u]) {
                    let txs: Vec<usize> = (0..n).filter(|&v| tx[v]).collect();
                    return Err(format!(
                        "n = {n}, edges {:?}, transmitters {txs:?}: node {u} should hear {:?}, resolver says {:?}",
                        g.edges().collect::<Vec<_>>(),
                        want[u],
                        got[u]
                    ));
                }
            }
        }
    }
    Ok(format!(
        "{cases} (graph, transmit pattern) cases match the brute-force rule"
    ))
}

#[allow(clippy::needless_range_loop)]
fn oracle_interval(schedule: &[RoundGraph], t: Horizon) -> bool {
    let len = schedule.len();
    let width = match t {
        Horizon::Finite(t) if (t as usize) < len => t as usize,
        _ => len,
    };
    (0..=len - width).all(|i| {
        let n = schedule[0].node_count();
        let common = |u: usize, v: usize| schedule[i..i + width].iter().all(|g| g.has_edge(u, v));
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if !seen[v] && common(u, v) {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter().all(|&s| s)
    })
}

fn check_connectivity(seed: u64) -> Check {
    let mut rng = seeded_rng(seed, "validate:connectivity");
    for case in 0..300 {
        let n = rng.random_range(2..=6);
        let len = rng.random_range(1..=8);
        let p = rng.random_range(0.3..0.95);
        let schedule: Vec<RoundGraph> = (0..len)
            .map(|_| {
                let edges: Vec<_> = (0..n)
                    .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                    .filter(|_| rng.random_bool(p))
                    .collect();
                RoundGraph::from_edges(n, edges).expect("valid edges")
            })
            .collect();
        let mut previous = true;
        for t in (1..=len as u64)
            .map(Horizon::Finite)
            .chain([Horizon::Infinite])
        {
            let got = check_interval_connectivity(&schedule, t).map_err(|e| e.to_string())?;
            let want = oracle_interval(&schedule, t);
            if got != want {
                return Err(format!("case {case}: n = {n}, length {len}, T = {t}: checker {got}, brute force {want}"));
            }
            if got && !previous {
                return Err(format!(
                    "case {case}: connected for T = {t} but not for a smaller T"
                ));
            }
            previous = got;
        }
    }
    Ok("300 random schedules agree with brute force; monotone in T".into())
}

fn check_field(seed: u64) -> Check {
    let mut rng = seeded_rng(seed, "validate:field");
    for q in [2u32, 3, 5, 257] {
        let f = Field::new(q).map_err(|e| e.to_string())?;
        for a in 1..q {
            let inv = f.inv(a).map_err(|e| e.to_string())?;
            if f.mul(a, inv) != 1 {
                return Err(format!("q = {q}: {a} * inv({a}) = {}", f.mul(a, inv)));
            }
        }
        for _ in 0..2000 {
            let (a, b, c) = (
                rng.random_range(0..q),
                rng.random_range(0..q),
                rng.random_range(0..q),
            );
            if f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c)) {
                return Err(format!("q = {q}: distributivity fails for ({a}, {b}, {c})"));
            }
            if f.add(f.sub(a, b), b) != a || f.add(a, f.neg(a)) != 0 {
                return Err(format!("q = {q}: subtraction fails for ({a}, {b})"));
            }
        }
    }
    if Field::new(257).and_then(|f| f.inv(0)).is_ok() {
        return Err("inv(0) did not fail".into());
    }
    Ok("inverses, distributivity and negation hold for q in {2, 3, 5, 257}".into())
}

fn check_span(seed: u64) -> Check {
    let mut rng = seeded_rng(seed, "validate:span");
    let f = Field::new(257).map_err(|e| e.to_string())?;
    let (s, l) = (4, 3);
    for trial in 0..200 {
        let messages: Vec<Vec<u32>> = (0..s)
            .map(|_| (0..l).map(|_| rng.random_range(0..257)).collect())
            .collect();
        let mut span = SpanState::new(f, s, l);
        let mut rank = 0;
        for _ in 0..8 {
            let mu: Vec<u32> = (0..s)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        0
                    } else {
                        rng.random_range(0..257)
                    }
                })
                .collect();
            let mut m = vec![0; l];
            for (k, msg) in mu.iter().zip(&messages) {
                f.axpy(&mut m, *k, msg);
            }
            let pkt = CodedPacket { mu, m };
            let grew = span.insert(&pkt).map_err(|e| e.to_string())?;
            if span.rank() < rank || span.rank() > s || grew != (span.rank() > rank) {
                return Err(format!(
                    "trial {trial}: rank went from {rank} to {}",
                    span.rank()
                ));
            }
            rank = span.rank();
            let before = span.clone();
            span.insert(&pkt).map_err(|e| e.to_string())?;
            if span != before {
                return Err(format!(
                    "trial {trial}: re-inserting a held packet changed the basis"
                ));
            }
            let sample = span.sample(&mut rng);
            if !sample.is_consistent(f, &messages)
                || span.basis().any(|b| !b.is_consistent(f, &messages))
            {
                return Err(format!(
                    "trial {trial}: span holds a packet inconsistent with the messages"
                ));
            }
        }
        if span.rank() == s && span.decode() != Decoded::Messages(messages.clone()) {
            return Err(format!(
                "trial {trial}: full-rank decode differs from the messages"
            ));
        }
    }
    Ok("rank monotone and bounded, insert idempotent, samples sound, decode exact over 200 random spans".into())
}

/// A minimal 1-oblivious adversary that reads last round's intents.
struct Probe {
    graph: Arc<RoundGraph>,
    peek: bool,
}

impl<M> AdversaryPolicy<M> for Probe {
    fn name(&self) -> &'static str {
        "probe"
    }
    fn tau(&self) -> Horizon {
        Horizon::Finite(1)
    }
    fn promise(&self) -> Horizon {
        Horizon::Infinite
    }
    fn lookback(&self) -> usize {
        1
    }
    fn next_graph(&mut self, view: &HistoryView<'_, M>) -> Arc<RoundGraph> {
        if self.peek {
            let _ = view.current_intents();
        } else if view.round() > 1 {
            let _ = view.record(view.round() - 1);
        }
        Arc::clone(&self.graph)
    }
}

fn check_audit(fault: Option<Fault>, seed: u64) -> Check {
    let n = 8;
    let sources = default_sources(n, 2);
    let informed = NodeSet::from_indices(n, sources.iter().map(|v: &NodeId| v.index()));
    let mk = |h: Horizon| RandomConnected::new(n, h, 0.1, seed).expect("valid parameters");
    let adversaries: Vec<Box<dyn AdversaryPolicy<CodedPacket>>> = vec![
        Box::new(Probe {
            graph: Arc::new(RoundGraph::complete(n)),
            peek: fault == Some(Fault::TauViolation),
        }),
        Box::new(StaticAdversary::new(RoundGraph::ring(n))),
        Box::new(StrongDualGraph::new(StableSubgraph::ring(n))),
        Box::new(mk(Horizon::Finite(1))),
        Box::new(mk(Horizon::Finite(3))),
        Box::new(IsolatingTree::new(informed, seed)),
    ];
    for mut adv in adversaries {
        let name = adv.name();
        let mut p = RlncBroadcast::new(n, &sources, &RlncParams::default(), seed)
            .map_err(|e| e.to_string())?;
        let out = run(&mut p, &mut adv, &RunOptions::new(seed, 300)).map_err(|e| e.to_string())?;
        if let Some(v) = out.audit.tau_violations.first() {
            return Err(format!("adversary {name}: {v}"));
        }
        if let Some(r) = out.audit.interval_failure {
            return Err(format!(
                "adversary {name}: interval promise T = {} broken at round {r}",
                adv.promise()
            ));
        }
    }
    Ok("every adversary respected its obliviousness and interval promise".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        let report = validate(&ValidateOptions::default()).unwrap();
        assert!(report.all_passed(), "{report}");
        assert_eq!(report.results.len(), VALIDATION_CHECKS.len());
    }

    #[test]
    fn reception_fault_is_caught_small() {
        let opts = ValidateOptions {
            checks: vec!["reception".into()],
            fault: Some(Fault::ReceptionOffByOne),
            seed: 0,
        };
        let report = validate(&opts).unwrap();
        let r = report.get("reception").unwrap();
        assert!(!r.passed);
        // The counterexample names its network size, which is tiny.
        let n: usize = r
            .detail
            .trim_start_matches("n = ")
            .split(',')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert!(n <= 6, "{}", r.detail);
    }

    #[test]
    fn tau_fault_is_named() {
        let opts = ValidateOptions {
            checks: vec!["audit".into()],
            fault: Some(Fault::TauViolation),
            seed: 0,
        };
        let r = validate(&opts).unwrap();
        let r = r.get("audit").unwrap();
        assert!(!r.passed);
        assert!(
            r.detail.contains("probe") && r.detail.contains("tau = 1"),
            "{}",
            r.detail
        );
    }

    #[test]
    fn unknown_check_is_a_config_error() {
        let opts = ValidateOptions {
            checks: vec!["vibes".into()],
            ..ValidateOptions::default()
        };
        assert!(validate(&opts).is_err());
        assert!("nonsense".parse::<Fault>().is_err());
    }
}
