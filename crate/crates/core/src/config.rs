use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

/// Parameters shared by every simulated run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Number of nodes.
    pub n: usize,
    /// Number of broadcast messages.
    pub s: usize,
    /// Communication capacity: broadcast messages per algorithm message.
    pub c: usize,
    /// Broadcast-message size in payload units. Accounting only.
    #[serde(default = "default_message_bits")]
    pub message_bits: u64,
    pub seed: u64,
    pub round_limit: u64,
}

fn default_message_bits() -> u64 {
    64
}

impl SimConfig {
    pub fn new(n: usize, s: usize, c: usize, seed: u64) -> Self {
        SimConfig {
            n,
            s,
            c,
            message_bits: default_message_bits(),
            seed,
            round_limit: u64::MAX,
        }
    }

    pub fn with_round_limit(mut self, limit: u64) -> Self {
        self.round_limit = limit;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.s < 1 {
            return Err(config("s must be at least 1"));
        }
        if self.c < 1 {
            return Err(config("c must be at least 1"));
        }
        if self.round_limit < 1 {
            return Err(config("round_limit must be at least 1"));
        }
        Ok(())
    }
}
