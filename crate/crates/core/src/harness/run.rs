use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::ExperimentSpec;
use crate::adversary::{
    AdversaryPolicy, IsolatingTree, RandomConnected, StableSubgraph, StaticAdversary,
    StrongDualGraph,
};
use crate::bitset::NodeSet;
use crate::engine::{run, DynamicHistory, Protocol, RunOptions, RunOutcome};
use crate::error::{config, Error, Result};
use crate::graph::RoundGraph;
use crate::multi::{default_sources, Algorithm1, Algorithm2, Knowledge};
use crate::primitives::Horizon;
use crate::rlnc::RlncBroadcast;
use crate::rng::{derive_seed, labels};
use crate::sf::dispatch;

/// Column order of sweep CSV files.
pub const CSV_COLUMNS: &[&str] = &[
    "protocol",
    "adversary",
    "n",
    "s",
    "c",
    "T",
    "tau",
    "trial",
    "seed",
    "rounds",
    "completed",
    "transmissions",
    "isolation_rounds",
    "collision_rounds",
    "phases",
    "audit_clean",
    "error",
];

/// One grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub n: usize,
    pub s: usize,
    pub c: usize,
    pub t: Horizon,
    pub tau: Horizon,
}

/// Measurements of one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metrics {
    /// Round by which every node knew every message, or the rounds run if
    /// that never happened.
    pub rounds: u64,
    pub completed: bool,
    pub transmissions: u64,
    pub isolation_rounds: u64,
    pub collision_rounds: u64,
    pub phases: Option<u64>,
    /// `deliveries[i][v]`: round node `v` first held message `i` (0 for its
    /// source). Coded runs report the node's decode round for every message.
    pub deliveries: Vec<Vec<Option<u64>>>,
    pub audit_clean: bool,
    /// Correctness violations reported by the protocol.
    pub violations: Vec<String>,
}

/// One line of the per-round event log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    pub round: u64,
    pub transmitters: usize,
    pub edges: usize,
    pub receptions: usize,
}

#[derive(Clone, Debug)]
pub struct TrialOutput {
    pub metrics: Metrics,
    pub trace: Option<Vec<TraceRow>>,
}

/// One CSV line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub protocol: String,
    pub adversary: String,
    pub n: usize,
    pub s: usize,
    pub c: usize,
    #[serde(rename = "T", deserialize_with = "horizon_text")]
    pub t: Horizon,
    #[serde(deserialize_with = "horizon_text")]
    pub tau: Horizon,
    pub trial: usize,
    pub seed: u64,
    pub rounds: Option<u64>,
    pub completed: Option<bool>,
    pub transmissions: Option<u64>,
    pub isolation_rounds: Option<u64>,
    pub collision_rounds: Option<u64>,
    pub phases: Option<u64>,
    pub audit_clean: Option<bool>,
    pub error: Option<String>,
}

// CSV fields carry no type, so horizons are read as text.
fn horizon_text<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Horizon, D::Error> {
    String::deserialize(de)?
        .parse()
        .map_err(serde::de::Error::custom)
}

fn trace_rows<M: Clone>(h: &DynamicHistory<M>) -> Vec<TraceRow> {
    h.records
        .iter()
        .map(|r| TraceRow {
            round: r.round,
            transmitters: r.transmitter_count(),
            edges: r.graph.edge_count(),
            receptions: r.senders.iter().filter(|s| s.is_some()).count(),
        })
        .collect()
}

fn deliveries(k: &Knowledge) -> Vec<Vec<Option<u64>>> {
    (0..k.message_count())
        .map(|i| {
            (0..k.node_count())
                .map(|v| k.first_round(v, i as u32))
                .collect()
        })
        .collect()
}

fn base_metrics<M: Clone>(out: &RunOutcome<M>) -> Metrics {
    Metrics {
        rounds: out.rounds,
        transmissions: out.stats.transmissions,
        isolation_rounds: out.stats.isolation_rounds,
        collision_rounds: out.stats.collision_rounds,
        audit_clean: out.audit.is_clean(),
        ..Metrics::default()
    }
}

fn stable_graph(name: &str, n: usize) -> RoundGraph {
    match name {
        "path" => RoundGraph::path(n),
        "complete" => RoundGraph::complete(n),
        _ => RoundGraph::ring(n),
    }
}

fn build_adversary<M: 'static>(
    spec: &ExperimentSpec,
    cell: &Cell,
    seed: u64,
) -> Result<Box<dyn AdversaryPolicy<M>>> {
    let n = cell.n;
    let adv: Box<dyn AdversaryPolicy<M>> = match spec.adversary.as_str() {
        "static" => Box::new(StaticAdversary::new(stable_graph(
            &spec.adversary_params.stable,
            n,
        ))),
        "dualgraph-strong" => Box::new(StrongDualGraph::new(StableSubgraph::new(stable_graph(
            &spec.adversary_params.stable,
            n,
        ))?)),
        "random-connected" => Box::new(RandomConnected::new(
            n,
            cell.t,
            spec.adversary_params.extra_edge_p,
            seed,
        )?),
        "isolating-tree" => {
            let sources =
                NodeSet::from_indices(n, default_sources(n, cell.s).iter().map(|v| v.index()));
            Box::new(IsolatingTree::new(sources, seed))
        }
        "target-network" => {
            return Err(config(
                "target-network needs a hitting game; run it through the hitgame command",
            ))
        }
        other => return Err(config(format!("unknown adversary {other:?}"))),
    };
    // The adversary may not be stronger than the cell's assumptions.
    if adv.tau() < cell.tau {
        return Err(config(format!(
            "{} is {}-oblivious but the cell assumes tau = {}",
            spec.adversary,
            adv.tau(),
            cell.tau
        )));
    }
    if adv.promise() < cell.t {
        return Err(config(format!(
            "{} only promises T = {} but the cell assumes T = {}",
            spec.adversary,
            adv.promise(),
            cell.t
        )));
    }
    Ok(adv)
}

type Driven<M> = (RunOutcome<M>, Option<Vec<TraceRow>>);

fn drive<P: Protocol + 'static>(
    protocol: &mut P,
    spec: &ExperimentSpec,
    cell: &Cell,
    seed: u64,
    opts: RunOptions,
) -> Result<Driven<P::Msg>>
where
    P::Msg: 'static,
{
    let mut adv = build_adversary::<P::Msg>(spec, cell, derive_seed(seed, labels::ADVERSARY))?;
    let mut out = run(protocol, &mut adv, &opts)?;
    let trace = out.history.take().map(|h| trace_rows(&h));
    Ok((out, trace))
}

/// Runs one trial of `cell` with `seed`.
pub fn run_trial(
    spec: &ExperimentSpec,
    cell: &Cell,
    seed: u64,
    trace: bool,
) -> Result<TrialOutput> {
    let Cell { n, s, c, .. } = *cell;
    crate::config::SimConfig::new(n, s, c, seed).validate()?;
    let sources = default_sources(n, s);
    let limit = spec.round_limit.unwrap_or(u64::MAX);
    let mut opts = RunOptions::new(seed, limit);
    opts.trace = trace;

    let (metrics, trace) = match spec.protocol.as_str() {
        "algorithm1" => {
            let setting = dispatch(n, cell.t, cell.tau, &spec.sf)?;
            let mut p = Algorithm1::new(n, c, &sources, setting, &spec.algorithm1)?;
            let (out, tr) = drive(&mut p, spec, cell, seed, opts.capacity(c))?;
            let mut m = base_metrics(&out);
            m.completed = p.completed_at().is_some();
            m.rounds = p.completed_at().unwrap_or(out.rounds);
            m.phases = Some(p.phase_log().len() as u64);
            m.deliveries = deliveries(p.knowledge());
            (m, tr)
        }
        "algorithm2" => {
            let setting = dispatch(n, cell.t, cell.tau, &spec.sf)?;
            let mut p = Algorithm2::new(n, &sources, &setting, &spec.algorithm2)?;
            let (out, tr) = drive(&mut p, spec, cell, seed, opts.capacity(1))?;
            let mut m = base_metrics(&out);
            m.violations = p.violations().to_vec();
            m.completed = p.completed_at().is_some() && m.violations.is_empty();
            m.rounds = p.completed_at().unwrap_or(out.rounds);
            m.phases = Some(p.phases());
            m.deliveries = deliveries(p.knowledge());
            (m, tr)
        }
        "rlnc" => {
            if cell.tau == Horizon::Finite(0) {
                return Err(config("coded broadcast assumes tau >= 1"));
            }
            let mut p = RlncBroadcast::new(n, &sources, &spec.rlnc, seed)?;
            opts.round_limit = opts.round_limit.min(p.budget());
            let (out, tr) = drive(&mut p, spec, cell, seed, opts.capacity(1))?;
            let mut m = base_metrics(&out);
            m.violations = p.violations().to_vec();
            m.completed = out.finished && m.violations.is_empty();
            m.rounds = p.completed_at().unwrap_or(out.rounds);
            m.deliveries = vec![p.decode_rounds().to_vec(); s];
            (m, tr)
        }
        other => return Err(config(format!("unknown protocol {other:?}"))),
    };
    Ok(TrialOutput { metrics, trace })
}

fn cells(spec: &ExperimentSpec) -> Vec<Cell> {
    let mut out = Vec::new();
    for &n in &spec.grid.n {
        for &s in &spec.grid.s {
            for &c in &spec.grid.c {
                for t in spec.t_values() {
                    for tau in spec.tau_values() {
                        out.push(Cell { n, s, c, t, tau });
                    }
                }
            }
        }
    }
    out
}

fn short_error(e: &Error) -> String {
    e.to_string().replace(['\n', '\r'], " ")
}

/// Runs every trial of every cell in grid order. Cells that fail their
/// preconditions yield one error row per trial; the sweep continues.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<Row>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for (ci, cell) in cells(spec).iter().enumerate() {
        for trial in 0..spec.trials {
            let seed = derive_seed(spec.seed, &labels::trial(ci, trial));
            let mut row = Row {
                protocol: spec.protocol.clone(),
                adversary: spec.adversary.clone(),
                n: cell.n,
                s: cell.s,
                c: cell.c,
                t: cell.t,
                tau: cell.tau,
                trial,
                seed,
                rounds: None,
                completed: None,
                transmissions: None,
                isolation_rounds: None,
                collision_rounds: None,
                phases: None,
                audit_clean: None,
                error: None,
            };
            match run_trial(spec, cell, seed, false) {
                Ok(TrialOutput { metrics: m, .. }) => {
                    row.rounds = Some(m.rounds);
                    row.completed = Some(m.completed);
                    row.transmissions = Some(m.transmissions);
                    row.isolation_rounds = Some(m.isolation_rounds);
                    row.collision_rounds = Some(m.collision_rounds);
                    row.phases = m.phases;
                    row.audit_clean = Some(m.audit_clean);
                    if let Some(v) = m.violations.first() {
                        row.error = Some(format!("violation: {v}"));
                    }
                }
                Err(e) => row.error = Some(short_error(&e)),
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[Row], w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wr.write_record(CSV_COLUMNS)?;
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<Row>> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    if headers.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(config(format!(
            "unexpected CSV columns; expected {}",
            CSV_COLUMNS.join(",")
        )));
    }
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}
