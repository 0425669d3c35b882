//! Experiment orchestration: configuration, sweeps to CSV, the hitting-game
//! driver, scaling fits and the self-check suite.

mod fit;
mod hitgame;
mod run;
mod spec;
mod validate;

pub use fit::{fit_scaling, fit_table, median, FitReport, Model};
pub use hitgame::{run_hitgame, HitgameRow, HitgameSpec, PLAYER_NAMES};
pub use run::{
    read_csv, run_experiment, run_trial, write_csv, Cell, Metrics, Row, TraceRow, TrialOutput,
    CSV_COLUMNS,
};
pub use spec::{AdversaryParams, ExperimentSpec, Grid, PROTOCOL_NAMES, SCHEMA_VERSION};
pub use validate::{
    validate, CheckResult, Fault, ValidateOptions, ValidationReport, VALIDATION_CHECKS,
};
