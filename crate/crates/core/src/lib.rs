//! Simulation of multi-message broadcast in adversarial dynamic radio
//! networks.
//!
//! The [`engine`] runs a [`Protocol`] against an [`AdversaryPolicy`] under
//! the radio reception rule of [`radio`]. Store-and-forward building blocks
//! live in [`sf`], the two generic multi-message algorithms in [`multi`],
//! network coding in [`rlnc`], the hitting-game reduction in
//! [`lower_bound`], and experiment orchestration in [`harness`].

pub mod adversary;
pub mod bitset;
pub mod config;
pub mod engine;
pub mod error;
pub mod graph;
pub mod harness;
pub mod lower_bound;
pub mod multi;
pub mod primitives;
pub mod radio;
pub mod rlnc;
pub mod rng;
pub mod sf;

pub use adversary::{AdversaryPolicy, StableSubgraph};
pub use bitset::NodeSet;
pub use config::SimConfig;
pub use engine::{run, HistoryView, Protocol, RunOptions, RunOutcome, Step};
pub use error::{Error, Result};
pub use graph::{check_interval_connectivity, RoundGraph};
pub use harness::{ExperimentSpec, Metrics};
pub use primitives::{Horizon, MsgId, NodeId};
pub use radio::{resolve_round, Delivery, Reception, TransmitIntent, WireMessage};
pub use rlnc::{CodedPacket, SpanState};
pub use rng::{derive_seed, seeded_rng, SimRng};
