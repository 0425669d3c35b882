//! Random linear network coding over a prime field.

mod field;
mod protocol;
mod span;

pub use field::Field;
pub use protocol::{RankEvent, RlncBroadcast, RlncParams};
pub use span::{CodedPacket, Decoded, SpanState};
