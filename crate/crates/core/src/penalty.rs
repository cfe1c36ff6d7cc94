//! The exponential cost parameter `t`, which may be infinite.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid cost parameter {0:?}: expected a finite real t >= 0 or \"inf\"")]
pub struct PenaltyError(pub String);

/// Cost parameter of the t-exponential length.
///
/// `Finite(0.0)` is the ordinary mean length and `Infinite` the base length
/// (longest contributing word).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Penalty {
    Finite(f64),
    Infinite,
}

impl Penalty {
    pub const ZERO: Penalty = Penalty::Finite(0.0);

    pub fn new(t: f64) -> Result<Self, PenaltyError> {
        if t.is_finite() && t >= 0.0 {
            Ok(Penalty::Finite(t))
        } else if t == f64::INFINITY {
            Ok(Penalty::Infinite)
        } else {
            Err(PenaltyError(t.to_string()))
        }
    }

    pub fn is_zero(self) -> bool {
        self == Penalty::Finite(0.0)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Penalty::Finite(t) => Some(t),
            Penalty::Infinite => None,
        }
    }

    /// The Rényi order 1/(1+t) matched to this cost (0 at infinity).
    pub fn renyi_order(self) -> f64 {
        match self {
            Penalty::Finite(t) => 1.0 / (1.0 + t),
            Penalty::Infinite => 0.0,
        }
    }

    /// Weight 1/(1+t) of the von Neumann term in the average-length tradeoff.
    pub fn mean_weight(self) -> f64 {
        self.renyi_order()
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Penalty::Finite(t) => t,
            Penalty::Infinite => f64::INFINITY,
        }
    }
}

impl Default for Penalty {
    fn default() -> Self {
        Penalty::ZERO
    }
}

impl fmt::Display for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Penalty::Finite(t) => write!(f, "{t}"),
            Penalty::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Penalty {
    type Err = PenaltyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" => Ok(Penalty::Infinite),
            _ => {
                let t: f64 = s.parse().map_err(|_| PenaltyError(s.to_string()))?;
                if !t.is_finite() {
                    return Err(PenaltyError(s.to_string()));
                }
                Penalty::new(t)
            }
        }
    }
}

impl Serialize for Penalty {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Penalty::Finite(t) => serializer.serialize_f64(*t),
            Penalty::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Penalty {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(t) => Penalty::new(t).map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
