//! `radiocast`: run simulations, sweeps, hitting games, self-checks and
//! scaling fits. Exit status 0 on success, 1 when a check fails, 2 on a
//! configuration error.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use radiocast_core::harness::{
    fit_scaling, read_csv, run_experiment, run_hitgame, run_trial, validate, write_csv, Cell,
    ExperimentSpec, Fault, HitgameSpec, Model, ValidateOptions,
};
use radiocast_core::Horizon;

#[derive(Parser)]
#[command(
    name = "radiocast",
    version,
    about = "Broadcast in adversarial dynamic radio networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One run of the first grid cell.
    Simulate(RunArgs),
    /// Every trial of every grid cell, one CSV row each.
    Sweep(RunArgs),
    /// Play the hitting game.
    Hitgame(HitArgs),
    /// Run the self-check suite.
    Validate(ValidateArgs),
    /// Fit median completion rounds of a sweep CSV to a model.
    Fit(FitArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    protocol: Option<String>,
    #[arg(long)]
    adversary: Option<String>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    s: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    c: Vec<usize>,
    /// Interval connectivity; integers or `inf`.
    #[arg(long = "T", value_delimiter = ',')]
    t: Vec<Horizon>,
    /// Obliviousness; integers or `inf`.
    #[arg(long, value_delimiter = ',')]
    tau: Vec<Horizon>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    round_limit: Option<u64>,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the per-round event log (simulate only).
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct HitArgs {
    /// `algorithm` or `uniform`.
    #[arg(long, default_value = "algorithm")]
    player: String,
    #[arg(long, default_value = "algorithm2")]
    protocol: String,
    #[arg(long, default_value_t = 24)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    s: usize,
    #[arg(long, default_value_t = 8)]
    alpha: u32,
    #[arg(long, default_value_t = 2)]
    beta: u32,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    round_limit: Option<u64>,
    /// Skip the ground-truth replay.
    #[arg(long)]
    no_verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Restrict to these checks.
    #[arg(long = "check")]
    checks: Vec<String>,
    /// Inject a known bug: `reception-off-by-one` or `tau-violation`.
    #[arg(long)]
    inject: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FitArgs {
    /// Sweep CSV.
    input: PathBuf,
    /// Terms joined by `+`, e.g. `1 + n^2 + n*s`.
    #[arg(long, default_value = "1 + n^2 + n*s")]
    model: String,
}

/// Failure kinds mapped to exit codes.
enum Failure {
    Check(String),
    Config(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

impl From<radiocast_core::Error> for Failure {
    fn from(e: radiocast_core::Error) -> Self {
        Failure::Config(e.into())
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_spec(a: &RunArgs) -> Result<ExperimentSpec, Failure> {
    let mut spec = match &a.config {
        Some(p) => ExperimentSpec::load(p)?,
        None => ExperimentSpec::default(),
    };
    if let Some(v) = &a.protocol {
        spec.protocol = v.clone();
    }
    if let Some(v) = &a.adversary {
        spec.adversary = v.clone();
    }
    if let Some(v) = a.seed {
        spec.seed = v;
    }
    if let Some(v) = a.trials {
        spec.trials = v;
    }
    if a.round_limit.is_some() {
        spec.round_limit = a.round_limit;
    }
    if a.out.is_some() {
        spec.out = a.out.clone();
    }
    let g = &mut spec.grid;
    for (dst, src) in [(&mut g.n, &a.n), (&mut g.s, &a.s), (&mut g.c, &a.c)] {
        if !src.is_empty() {
            *dst = src.clone();
        }
    }
    if !a.t.is_empty() {
        g.t = a.t.clone();
    }
    if !a.tau.is_empty() {
        g.tau = a.tau.clone();
    }
    spec.validate()?;
    Ok(spec)
}

fn simulate(a: &RunArgs) -> Result<(), Failure> {
    let spec = load_spec(a)?;
    let cell = Cell {
        n: spec.grid.n[0],
        s: spec.grid.s[0],
        c: spec.grid.c[0],
        t: spec.t_values()[0],
        tau: spec.tau_values()[0],
    };
    let out = run_trial(&spec, &cell, spec.seed, a.trace)?;
    let m = &out.metrics;
    let mut w = output(&spec.out)?;
    let write = |w: &mut dyn Write| -> io::Result<()> {
        writeln!(w, "protocol: {}", spec.protocol)?;
        writeln!(w, "adversary: {}", spec.adversary)?;
        writeln!(
            w,
            "cell: n={} s={} c={} T={} tau={}",
            cell.n, cell.s, cell.c, cell.t, cell.tau
        )?;
        writeln!(w, "seed: {}", spec.seed)?;
        writeln!(w, "completed: {}", m.completed)?;
        writeln!(w, "rounds: {}", m.rounds)?;
        writeln!(w, "transmissions: {}", m.transmissions)?;
        writeln!(w, "isolation_rounds: {}", m.isolation_rounds)?;
        writeln!(w, "collision_rounds: {}", m.collision_rounds)?;
        if let Some(p) = m.phases {
            writeln!(w, "phases: {p}")?;
        }
        writeln!(w, "audit_clean: {}", m.audit_clean)?;
        for v in &m.violations {
            writeln!(w, "violation: {v}")?;
        }
        if let Some(trace) = &out.trace {
            writeln!(w, "round,transmitters,edges,receptions")?;
            for r in trace {
                writeln!(
                    w,
                    "{},{},{},{}",
                    r.round, r.transmitters, r.edges, r.receptions
                )?;
            }
        }
        Ok(())
    };
    write(&mut *w).context("writing output")?;
    if !m.violations.is_empty() || !m.audit_clean {
        return Err(Failure::Check("the run reported violations".into()));
    }
    Ok(())
}

fn sweep(a: &RunArgs) -> Result<(), Failure> {
    let spec = load_spec(a)?;
    let rows = run_experiment(&spec)?;
    write_csv(&rows, output(&spec.out)?)?;
    let errors = rows.iter().filter(|r| r.error.is_some()).count();
    if errors > 0 {
        eprintln!("{errors} of {} rows carry an error", rows.len());
    }
    Ok(())
}

fn hitgame(a: &HitArgs) -> Result<(), Failure> {
    let spec = HitgameSpec {
        player: a.player.clone(),
        protocol: a.protocol.clone(),
        n: a.n,
        s: a.s,
        alpha: a.alpha,
        beta: a.beta,
        trials: a.trials,
        seed: a.seed,
        round_limit: a.round_limit,
        verify: !a.no_verify,
    };
    let rows = run_hitgame(&spec)?;
    let mut w = csv::Writer::from_writer(output(&a.out)?);
    for r in &rows {
        w.serialize(r).context("writing CSV")?;
    }
    w.flush().context("writing CSV")?;
    let bad = rows
        .iter()
        .filter(|r| r.replay_match == Some(false))
        .count();
    if bad > 0 {
        return Err(Failure::Check(format!(
            "{bad} transcripts differ from the ground-truth replay"
        )));
    }
    Ok(())
}

fn run_validate(a: &ValidateArgs) -> Result<(), Failure> {
    let fault = a.inject.as_deref().map(str::parse::<Fault>).transpose()?;
    let report = validate(&ValidateOptions {
        checks: a.checks.clone(),
        fault,
        seed: a.seed,
    })?;
    print!("{report}");
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Check("validation failed".into()))
    }
}

fn fit(a: &FitArgs) -> Result<(), Failure> {
    let file = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let rows = read_csv(file)?;
    let model = Model::parse(&a.model)?;
    let report = fit_scaling(&rows, &model)?;
    print!("{report}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Hitgame(a) => hitgame(a),
        Command::Validate(a) => run_validate(a),
        Command::Fit(a) => fit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
