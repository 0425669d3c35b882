//! Single-message store-and-forward broadcast building blocks.
//!
//! A [`Schedule`] only decides when an informed node transmits, given the
//! round it woke up in. [`LimitedRun`] drives one k-limited broadcast of a
//! payload; [`ResistantRun`] is the concurrency-resistant wrapper that ends
//! with every node detecting success or failure. [`Setting`] picks the
//! schedules and round budgets for the three connectivity regimes.

mod dispatch;
mod limited;
mod params;
mod resistant;
mod schedule;
mod single;

use smallvec::SmallVec;

pub use dispatch::{dispatch, Setting, SettingKind, SfParams};
pub use limited::LimitedRun;
pub use params::{HarmonicParams, HomogeneousParams, PsiParams};
pub use resistant::{Detection, ResistantPlan, ResistantRun, ResistantStage};
pub use schedule::{Prob, Schedule};
pub use single::{SingleBcastOutcome, SingleBroadcast};

use crate::primitives::MsgId;
use crate::radio::WireMessage;

/// Broadcast messages packed into one algorithm message.
pub type Bundle = SmallVec<[MsgId; 4]>;

/// What store-and-forward protocols put on the channel.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SfMessage {
    Data(Bundle),
    /// Control message announcing that several distinct messages were seen.
    Bottom,
}

impl SfMessage {
    pub fn single(id: MsgId) -> Self {
        let mut b = Bundle::new();
        b.push(id);
        SfMessage::Data(b)
    }
}

impl WireMessage for SfMessage {
    fn broadcast_ids(&self) -> &[MsgId] {
        match self {
            SfMessage::Data(b) => b,
            SfMessage::Bottom => &[],
        }
    }
}
