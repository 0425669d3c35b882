use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adversary::ADVERSARY_NAMES;
use crate::error::{config, Result};
use crate::multi::{Algorithm1Params, Algorithm2Params};
use crate::primitives::Horizon;
use crate::rlnc::RlncParams;
use crate::sf::SfParams;

/// Names accepted for `protocol`.
pub const PROTOCOL_NAMES: &[&str] = &["algorithm1", "algorithm2", "rlnc"];

/// Version of the configuration and CSV layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Parameter grid; every combination is one cell. Empty `T` or `tau`
/// lists fall back to the adversary's native values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub n: Vec<usize>,
    pub s: Vec<usize>,
    pub c: Vec<usize>,
    #[serde(rename = "T")]
    pub t: Vec<Horizon>,
    pub tau: Vec<Horizon>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            n: vec![16],
            s: vec![4],
            c: vec![1],
            t: Vec::new(),
            tau: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdversaryParams {
    /// Stable subgraph of `static` and `dualgraph-strong`: `ring`, `path`
    /// or `complete`.
    pub stable: String,
    /// Extra-edge probability of `random-connected`.
    pub extra_edge_p: f64,
}

impl Default for AdversaryParams {
    fn default() -> Self {
        AdversaryParams {
            stable: "ring".into(),
            extra_edge_p: 0.0,
        }
    }
}

/// One sweep, as read from a TOML file and then overridden by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema: u32,
    pub protocol: String,
    pub adversary: String,
    pub grid: Grid,
    pub trials: usize,
    pub seed: u64,
    /// Per-run cap; protocols with their own budget use the smaller one.
    pub round_limit: Option<u64>,
    pub out: Option<PathBuf>,
    pub sf: SfParams,
    pub algorithm1: Algorithm1Params,
    pub algorithm2: Algorithm2Params,
    pub rlnc: RlncParams,
    pub adversary_params: AdversaryParams,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            schema: SCHEMA_VERSION,
            protocol: "algorithm2".into(),
            adversary: "dualgraph-strong".into(),
            grid: Grid::default(),
            trials: 1,
            seed: 0,
            round_limit: None,
            out: None,
            sf: SfParams::default(),
            algorithm1: Algorithm1Params::default(),
            algorithm2: Algorithm2Params::default(),
            rlnc: RlncParams::default(),
            adversary_params: AdversaryParams::default(),
        }
    }
}

fn check_name(kind: &str, name: &str, valid: &[&str]) -> Result<()> {
    if valid.contains(&name) {
        Ok(())
    } else {
        Err(config(format!(
            "unknown {kind} {name:?}; valid names: {}",
            valid.join(", ")
        )))
    }
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("specs always serialize")
    }

    /// Checks everything that does not depend on a particular cell.
    /// Cell-level problems become error rows instead.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(config(format!(
                "unsupported schema {}; this build reads {SCHEMA_VERSION}",
                self.schema
            )));
        }
        check_name("protocol", &self.protocol, PROTOCOL_NAMES)?;
        check_name("adversary", &self.adversary, ADVERSARY_NAMES)?;
        check_name(
            "stable subgraph",
            &self.adversary_params.stable,
            &["ring", "path", "complete"],
        )?;
        if !(0.0..=1.0).contains(&self.adversary_params.extra_edge_p) {
            return Err(config("extra_edge_p must lie in [0, 1]"));
        }
        if self.trials < 1 {
            return Err(config("trials must be at least 1"));
        }
        if self.round_limit == Some(0) {
            return Err(config("round_limit must be at least 1"));
        }
        let g = &self.grid;
        if g.n.is_empty() || g.s.is_empty() || g.c.is_empty() {
            return Err(config("grid lists n, s and c must be non-empty"));
        }
        Ok(())
    }

    /// Native `(T, tau)` of the configured adversary.
    pub fn native_horizons(&self) -> (Horizon, Horizon) {
        use Horizon::{Finite, Infinite};
        match self.adversary.as_str() {
            "dualgraph-strong" => (Infinite, Finite(0)),
            "random-connected" => (Finite(1), Infinite),
            "isolating-tree" | "target-network" => (Finite(1), Finite(1)),
            _ => (Infinite, Infinite),
        }
    }

    pub fn t_values(&self) -> Vec<Horizon> {
        if self.grid.t.is_empty() {
            vec![self.native_horizons().0]
        } else {
            self.grid.t.clone()
        }
    }

    pub fn tau_values(&self) -> Vec<Horizon> {
        if self.grid.tau.is_empty() {
            vec![self.native_horizons().1]
        } else {
            self.grid.tau.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let text = r#"
            protocol = "rlnc"
            adversary = "random-connected"
            trials = 3
            seed = 7
            [grid]
            n = [8, 16]
            s = [2, 4]
            T = [1, "inf"]
            [rlnc]
            q = 7
        "#;
        let spec = ExperimentSpec::from_toml(text).unwrap();
        assert_eq!(spec.grid.t, vec![Horizon::Finite(1), Horizon::Infinite]);
        assert_eq!(spec.rlnc.q, 7);
        assert_eq!(spec.grid.c, vec![1]);
        assert_eq!(ExperimentSpec::from_toml(&spec.to_toml()).unwrap(), spec);
    }

    #[test]
    fn unknown_names_list_valid_ones() {
        let err = ExperimentSpec::from_toml("protocol = \"gossip\"")
            .unwrap_err()
            .to_string();
        assert!(err.contains("algorithm1, algorithm2, rlnc"), "{err}");
        let err = ExperimentSpec::from_toml("adversary = \"nice\"")
            .unwrap_err()
            .to_string();
        assert!(err.contains("isolating-tree"), "{err}");
        assert!(ExperimentSpec::from_toml("bogus = 1").is_err());
        assert!(ExperimentSpec::from_toml("schema = 2").is_err());
        assert!(ExperimentSpec::from_toml("trials = 0").is_err());
    }
}
