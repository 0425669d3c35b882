use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Node identity. Stored 0-based; [`NodeId::label`] gives the 1-based ID
/// used in the model (`[n] = {1, ..., n}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_label(label: u32) -> NodeId {
        assert!(label >= 1, "node labels start at 1");
        NodeId(label - 1)
    }

    pub fn label(self) -> u32 {
        self.0 + 1
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.label())
    }
}

/// Index of a broadcast message, `0..s`.
pub type MsgId = u32;

/// A round count that may be unbounded: used for the interval-connectivity
/// promise `T` and for the adversary's obliviousness `tau`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Horizon {
    Finite(u64),
    Infinite,
}

impl Horizon {
    pub fn finite(self) -> Option<u64> {
        match self {
            Horizon::Finite(v) => Some(v),
            Horizon::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Horizon::Infinite)
    }

    /// `self <= v` where `Infinite` exceeds every finite value.
    pub fn at_most(self, v: u64) -> bool {
        matches!(self, Horizon::Finite(x) if x <= v)
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Horizon::Finite(v) => write!(f, "{v}"),
            Horizon::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Horizon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Horizon::Infinite),
            t => t
                .parse::<u64>()
                .map(Horizon::Finite)
                .map_err(|_| Error::Config(format!("expected an integer or \"inf\", got {s:?}"))),
        }
    }
}

impl Serialize for Horizon {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Horizon::Finite(v) => ser.serialize_u64(*v),
            Horizon::Infinite => ser.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Horizon {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Int(v) => Ok(Horizon::Finite(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizon_parse_and_order() {
        assert_eq!("inf".parse::<Horizon>().unwrap(), Horizon::Infinite);
        assert_eq!("12".parse::<Horizon>().unwrap(), Horizon::Finite(12));
        assert!("x".parse::<Horizon>().is_err());
        assert!(Horizon::Finite(u64::MAX) < Horizon::Infinite);
        assert!(Horizon::Finite(0).at_most(0));
        assert!(!Horizon::Infinite.at_most(u64::MAX));
    }

    #[test]
    fn node_labels_are_one_based() {
        assert_eq!(NodeId::from_label(1), NodeId(0));
        assert_eq!(NodeId(4).label(), 5);
        assert_eq!(NodeId(4).to_string(), "v5");
    }
}
