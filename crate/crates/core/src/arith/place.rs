use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// A place of Q: the real embedding or the p-adic completion at a prime p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Real,
    Finite(BigInt),
}

impl Place {
    pub fn finite(p: impl Into<BigInt>) -> Place {
        Place::Finite(p.into())
    }

    pub fn prime(&self) -> Option<&BigInt> {
        match self {
            Place::Real => None,
            Place::Finite(p) => Some(p),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Place::Real)
    }
}

impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Real, Place::Real) => Ordering::Equal,
            (Place::Real, _) => Ordering::Less,
            (_, Place::Real) => Ordering::Greater,
            (Place::Finite(p), Place::Finite(q)) => p.cmp(q),
        }
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "real"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "real" | "inf" | "R" => Ok(Place::Real),
            other => other
                .parse::<BigInt>()
                .map(Place::Finite)
                .map_err(|e| format!("bad place {other:?}: {e}")),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
