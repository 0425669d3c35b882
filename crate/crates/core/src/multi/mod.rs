//! The generic multi-message algorithms and the abstract coupon process
//! behind the first one.

mod algorithm1;
mod algorithm2;
mod coupon;
mod knowledge;

pub use algorithm1::{Algorithm1, Algorithm1Params, PhaseRecord};
pub use algorithm2::{Alg2PhaseRecord, Algorithm2, Algorithm2Params};
pub use coupon::{collection_probability, coupon_collection_run, CouponState};
pub use knowledge::Knowledge;

use crate::error::{config, Result};
use crate::primitives::NodeId;

/// Default source placement: message `i` starts at node `i mod n`.
pub fn default_sources(n: usize, s: usize) -> Vec<NodeId> {
    (0..s).map(|i| NodeId::from(i % n)).collect()
}

pub(crate) fn check_sources(n: usize, s: usize, sources: &[NodeId]) -> Result<()> {
    if sources.len() != s {
        return Err(config(format!(
            "{} sources given for {s} messages",
            sources.len()
        )));
    }
    if let Some(v) = sources.iter().find(|v| v.index() >= n) {
        return Err(config(format!("source {v} outside the {n} nodes")));
    }
    Ok(())
}
